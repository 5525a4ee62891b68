#!/usr/bin/env python3
"""Writes a seeded synthetic KernelLang corpus.

The kernels imitate the shapes found in small OpenCL benchmark suites:
element-wise maps, guarded maps, stencils, loops over rows, reductions with
atomics and tiles staged through local memory. A small share of the files
contain kernels with deliberate mistakes so that ingestion has something to
reject.

    python3 tools/gen_corpus.py --out data/corpus --kernels 600 --seed 1
"""

import argparse
import random
from pathlib import Path

POINTER_NAMES = ["input", "output", "src", "dst", "data", "values", "weights", "result",
                 "lhs", "rhs", "buffer", "samples", "coeffs", "field", "hist", "counts"]
SCALAR_NAMES = ["n", "width", "height", "count", "stride", "offset", "scale", "alpha", "beta", "limit"]
LOCAL_NAMES = ["tile", "scratch", "shared", "cache"]
TEMP_NAMES = ["acc", "sum", "tmp", "val", "x", "y", "delta", "weight", "norm", "best", "flag", "hit"]
KERNEL_VERBS = ["scale", "add", "blend", "reduce", "stencil", "clamp", "saxpy", "histogram", "transpose",
                "smooth", "threshold", "accumulate", "normalize", "gather", "scatter", "relu", "diff", "mix"]


class Scope:
    def __init__(self, rng):
        self.rng = rng
        self.pointers = []   # (name, type, space)
        self.scalars = []    # (name, type)
        self.used = set()

    def fresh(self, pool):
        choices = [p for p in pool if p not in self.used]
        if not choices:
            base = self.rng.choice(pool)
            k = 2
            while f"{base}{k}" in self.used:
                k += 1
            name = f"{base}{k}"
        else:
            name = self.rng.choice(choices)
        self.used.add(name)
        return name

    def scalars_of(self, ty):
        return [n for n, t in self.scalars if t == ty]

    def pointers_of(self, ty=None, space=None):
        return [n for n, t, s in self.pointers if (ty is None or t == ty) and (space is None or s == space)]


def int_literal(rng):
    return str(rng.choice([0, 1, 1, 2, 2, 3, 4, 8, 16, 32, rng.randint(0, 99)]))


def float_literal(rng):
    return rng.choice(["0.5", "1.0", "2.0", "0.25", "3.0", "0.1", "1.5", "10.0", f"{rng.randint(0, 9)}.{rng.randint(0, 9)}"])


def index_expr(scope, rng, gid):
    r = rng.random()
    ints = scope.scalars_of("int")
    if r < 0.45:
        return gid
    if r < 0.55:
        return "get_global_id(0)"
    if r < 0.7:
        return f"{gid} {rng.choice(['+', '-'])} {rng.choice(['1', '2'])}"
    if r < 0.8 and ints:
        return f"{gid} * {rng.choice(ints)} + {rng.choice(ints)}"
    if r < 0.9:
        return f"{gid} % {rng.choice(['16', '32', '64'])}"
    return int_literal(rng)


def num_expr(scope, rng, ty, gid, depth):
    """Expression of numeric type `ty` ("int" or "float")."""
    leaves = []
    for n in scope.scalars_of(ty):
        leaves.append(n)
    for p in scope.pointers_of(ty):
        leaves.append(f"{p}[{index_expr(scope, rng, gid)}]")
    leaves.append(int_literal(rng) if ty == "int" else float_literal(rng))
    if depth <= 0 or rng.random() < 0.35:
        return rng.choice(leaves)
    r = rng.random()
    if ty == "float" and r < 0.12:
        fn = rng.choice(["sqrt", "fabs"])
        return f"{fn}({num_expr(scope, rng, 'float', gid, depth - 1)})"
    if r < 0.22:
        fn = rng.choice(["min", "max"])
        return f"{fn}({num_expr(scope, rng, ty, gid, depth - 1)}, {num_expr(scope, rng, ty, gid, depth - 1)})"
    ops = ["+", "-", "*", "+", "*"] + (["/", "%"] if ty == "int" else ["/"])
    op = rng.choice(ops)
    lhs = num_expr(scope, rng, ty, gid, depth - 1)
    rhs = num_expr(scope, rng, ty, gid, depth - 1)
    if op in ("/", "%") and ty == "int":
        rhs = rng.choice(["2", "4", "8", "16"]) if rng.random() < 0.7 else rhs
    if rng.random() < 0.25:
        return f"({lhs} {op} {rhs})"
    return f"{lhs} {op} {rhs}"


def cond_expr(scope, rng, gid):
    ints = scope.scalars_of("int")
    r = rng.random()
    if r < 0.4 and ints:
        return f"{gid} < {rng.choice(ints)}"
    ty = rng.choice(["int", "float"])
    rel = rng.choice(["<", "<=", ">", ">=", "==", "!="])
    base = f"{num_expr(scope, rng, ty, gid, 1)} {rel} {num_expr(scope, rng, ty, gid, 0)}"
    bools = scope.scalars_of("bool")
    if r > 0.85 and bools:
        return f"{base} {rng.choice(['&&', '||'])} {rng.choice(bools)}"
    if r > 0.75:
        return f"!({base})"
    return base


class Body:
    def __init__(self, scope, rng, gid):
        self.scope, self.rng, self.gid = scope, rng, gid
        self.lines = []

    def emit(self, line, indent):
        self.lines.append("  " * indent + line)

    def store(self, indent):
        rng, scope = self.rng, self.scope
        targets = scope.pointers_of(space="global") or scope.pointers_of()
        name = rng.choice(targets)
        ty = next(t for n, t, _ in scope.pointers if n == name)
        idx = self.gid if rng.random() < 0.7 else index_expr(scope, rng, self.gid)
        self.emit(f"{name}[{idx}] = {num_expr(scope, rng, ty, self.gid, rng.choice([1, 2]))};", indent)

    def declare(self, indent):
        rng, scope = self.rng, self.scope
        if rng.random() < 0.12:
            name = scope.fresh(TEMP_NAMES)
            self.emit(f"bool {name} = {cond_expr(scope, rng, self.gid)};", indent)
            scope.scalars.append((name, "bool"))
            return
        ty = rng.choice(["int", "float", "float"])
        name = scope.fresh(TEMP_NAMES)
        self.emit(f"{ty} {name} = {num_expr(scope, rng, ty, self.gid, 2)};", indent)
        scope.scalars.append((name, ty))

    def update(self, indent):
        rng, scope = self.rng, self.scope
        locals_ = [(n, t) for n, t in scope.scalars if t != "bool" and n != self.gid and n not in scope.params]
        if not locals_:
            return self.declare(indent)
        name, ty = rng.choice(locals_)
        self.emit(f"{name} = {name} {rng.choice(['+', '*', '-'])} {num_expr(scope, rng, ty, self.gid, 1)};", indent)

    def atomic(self, indent):
        rng, scope = self.rng, self.scope
        ptrs = scope.pointers_of("int") + scope.pointers_of("float")
        name = rng.choice(ptrs)
        ty = next(t for n, t, _ in scope.pointers if n == name)
        idx = rng.choice(["0", f"{self.gid} % 8", "1"])
        self.emit(f"atomic_add(&{name}[{idx}], {num_expr(scope, rng, ty, self.gid, 1)});", indent)

    def branch(self, indent, depth):
        rng = self.rng
        self.emit(f"if ({cond_expr(self.scope, rng, self.gid)}) {{", indent)
        self.block(indent + 1, depth - 1, rng.randint(1, 2))
        if rng.random() < 0.4:
            self.emit("} else {", indent)
            self.block(indent + 1, depth - 1, 1)
        self.emit("}", indent)

    def loop(self, indent, depth):
        rng, scope = self.rng, self.scope
        var = scope.fresh(["k", "j", "step", "it", "m"])
        ints = scope.scalars_of("int")
        bound = rng.choice([b for b in ints if b != self.gid] or ["4"]) if rng.random() < 0.6 else rng.choice(["4", "8", "16"])
        self.emit(f"for (int {var} = 0; {var} < {bound}; {var} = {var} + 1) {{", indent)
        scope.scalars.append((var, "int"))
        self.block(indent + 1, depth - 1, rng.randint(1, 2))
        scope.scalars.remove((var, "int"))
        self.emit("}", indent)

    def block(self, indent, depth, count):
        rng = self.rng
        saved = list(self.scope.scalars)
        for _ in range(count):
            r = rng.random()
            if r < 0.35:
                self.store(indent)
            elif r < 0.55:
                self.declare(indent)
            elif r < 0.65:
                self.update(indent)
            elif r < 0.73 and self.scope.pointers_of("int") + self.scope.pointers_of("float"):
                self.atomic(indent)
            elif r < 0.87 and depth > 0:
                self.branch(indent, depth)
            elif depth > 0:
                self.loop(indent, depth)
            else:
                self.store(indent)
        self.scope.scalars = saved


def make_kernel(rng, index):
    scope = Scope(rng)
    scope.params = set()
    params = []
    for _ in range(rng.choice([1, 2, 2, 3, 3, 4])):
        name = scope.fresh(POINTER_NAMES)
        ty = rng.choice(["float", "float", "int"])
        scope.pointers.append((name, ty, "global"))
        params.append(f"global {ty}* {name}")
        scope.params.add(name)
    if rng.random() < 0.15:
        name = scope.fresh(LOCAL_NAMES)
        ty = rng.choice(["float", "int"])
        scope.pointers.append((name, ty, "local"))
        params.append(f"local {ty}* {name}")
        scope.params.add(name)
    for _ in range(rng.choice([0, 0, 1, 1, 2])):
        name = scope.fresh(SCALAR_NAMES)
        ty = rng.choice(["int", "int", "float"])
        scope.scalars.append((name, ty))
        params.append(f"{ty} {name}")
        scope.params.add(name)
    rng.shuffle(params)

    gid = scope.fresh(["i", "gid", "idx", "tid", "id"])
    body = Body(scope, rng, gid)
    body.emit(f"int {gid} = get_global_id(0);", 1)
    scope.scalars.append((gid, "int"))
    local = scope.pointers_of(space="local")
    if local:
        tile = local[0]
        ty = next(t for n, t, _ in scope.pointers if n == tile)
        srcs = scope.pointers_of(ty, "global")
        src = f"{srcs[0]}[{gid}]" if srcs else ("1" if ty == "int" else "1.0")
        body.emit(f"{tile}[{gid} % 16] = {src};", 1)
        body.emit("barrier();", 1)
    body.block(1, rng.choice([1, 1, 2]), rng.randint(1, 3))
    if not any("[" in line and "=" in line.split("[", 1)[1] for line in body.lines[1:]):
        body.store(1)

    name = f"{rng.choice(KERNEL_VERBS)}_{rng.choice(['f32', 'i32', 'v2', 'fast', 'naive', 'tiled', 'k'])}{index}"
    header = f"kernel void {name}({', '.join(params)})"
    return header + " {\n" + "\n".join(body.lines) + "\n}\n"


def corrupt(kernel, rng):
    """Introduces a single mistake that validation must catch."""
    lines = kernel.split("\n")
    mode = rng.choice(["undeclared", "semicolon", "modfloat", "brace", "lex"])
    if mode == "undeclared":
        lines.insert(2, "  undefined_thing = 1;")
    elif mode == "semicolon":
        for k in range(2, len(lines)):
            if lines[k].rstrip().endswith(";"):
                lines[k] = lines[k].rstrip()[:-1]
                break
    elif mode == "modfloat":
        lines.insert(2, "  float bad = 1.5 % 2.0;")
    elif mode == "brace":
        return kernel.rstrip().rstrip("}") + "\n"
    else:
        lines.insert(2, "  int weird = 3 @ 4;")
    return "\n".join(lines)


COMMENTS = ["// ported from the reference implementation", "/* one work-item per element */",
            "// TODO: vectorise", "// assumes n is a multiple of the work-group size",
            "/* naive version, kept for comparison */"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--kernels", type=int, default=600)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--broken", type=float, default=0.06, help="fraction of kernels made invalid")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    for old in args.out.glob("*.kl"):
        old.unlink()

    written, file_index = 0, 0
    while written < args.kernels:
        per_file = min(rng.choice([1, 1, 1, 2, 3]), args.kernels - written)
        chunks = []
        for _ in range(per_file):
            text = make_kernel(rng, written)
            if rng.random() < args.broken:
                text = corrupt(text, rng)
            if rng.random() < 0.3:
                text = rng.choice(COMMENTS) + "\n" + text
            chunks.append(text)
            written += 1
        (args.out / f"k{file_index:04d}.kl").write_text("\n".join(chunks))
        file_index += 1
    print(f"wrote {written} kernels in {file_index} files to {args.out}")


if __name__ == "__main__":
    main()
