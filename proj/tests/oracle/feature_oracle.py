"""Token-level feature counts for the golden kernel suite.

Works on the raw token stream without building a syntax tree, so it shares
no logic with the C++ extractors. Run it to regenerate
tests/data/golden_features.json after adding kernels to tests/data/golden.
"""

import json
import re
import sys
from pathlib import Path

TOKEN = re.compile(
    r"\s+|//[^\n]*|/\*.*?\*/"
    r"|(?P<tok>[A-Za-z_]\w*|\d+\.\d+|\d+|<=|>=|==|!=|&&|\|\||[-!%&()*,+/;<=>\[\]{}])",
    re.S,
)
BUILTIN_MATH = {"sqrt", "fabs", "min", "max"}
RELATIONAL = {"<", "<=", ">", ">=", "==", "!="}
VALUE_END = re.compile(r"[A-Za-z_]\w*|\d+\.\d+|\d+|\)|\]")
KEYWORDS = {"kernel", "void", "global", "local", "int", "float", "bool", "if", "else", "for", "barrier"}

GREWE = ["comp", "rational", "atomic", "mem", "localmem", "coalesced", "comp_mem_ratio", "coalesced_mem_ratio"]
IRCOUNT = ["add", "sub", "mul", "div", "rem", "cmp", "and", "or", "load", "store", "br", "call", "atomicrmw",
           "total_insts", "total_blocks", "total_funcs"]


def tokenize(text):
    out, pos = [], 0
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot tokenize at {pos}: {text[pos:pos + 10]!r}")
        if m.group("tok"):
            out.append(m.group("tok"))
        pos = m.end()
    return out


def closing(tokens, i, open_tok, close_tok):
    depth = 0
    for j in range(i, len(tokens)):
        if tokens[j] == open_tok:
            depth += 1
        elif tokens[j] == close_tok:
            depth -= 1
            if depth == 0:
                return j
    raise ValueError("unbalanced brackets")


def binary_minus(tokens, i):
    prev = tokens[i - 1]
    return bool(VALUE_END.fullmatch(prev)) and prev not in KEYWORDS


def local_pointers(tokens):
    names = set()
    for i, t in enumerate(tokens):
        if t == "local" and tokens[i + 2] == "*":
            names.add(tokens[i + 3])
    return names


def features(text):
    t = tokenize(text)
    locals_ = local_pointers(t)
    g = dict.fromkeys(GREWE[:6], 0)
    ir = dict.fromkeys(IRCOUNT, 0)

    for i, tok in enumerate(t):
        nxt = t[i + 1] if i + 1 < len(t) else None
        if tok == "*" and t[i - 1] in ("int", "float", "bool"):
            continue
        if tok in ("+", "*", "/", "%", "&&", "||"):
            g["comp"] += 1
            ir[{"+": "add", "*": "mul", "/": "div", "%": "rem", "&&": "and", "||": "or"}[tok]] += 1
        elif tok == "-":
            if binary_minus(t, i):
                g["comp"] += 1
            ir["sub"] += 1
        elif tok in RELATIONAL:
            g["rational"] += 1
            ir["cmp"] += 1
        elif tok == "!":
            ir["cmp"] += 1
        elif tok in BUILTIN_MATH and nxt == "(":
            g["comp"] += 1
            ir["call"] += 1
        elif tok == "get_global_id":
            ir["call"] += 1
        elif tok == "barrier":
            ir["call"] += 1
        elif tok == "atomic_add":
            g["atomic"] += 1
            ir["atomicrmw"] += 1
        elif nxt == "[" and re.fullmatch(r"[A-Za-z_]\w*", tok):
            g["mem"] += 1
            if tok in locals_:
                g["localmem"] += 1
            end = closing(t, i + 1, "[", "]")
            if t[i + 2:end] == ["get_global_id", "(", "0", ")"]:
                g["coalesced"] += 1
            if t[i - 1] == "&":
                pass
            elif end + 1 < len(t) and t[end + 1] == "=":
                ir["store"] += 1
            else:
                ir["load"] += 1
        elif tok == "if":
            body_end = closing(t, closing(t, i + 1, "(", ")") + 1, "{", "}")
            has_else = body_end + 1 < len(t) and t[body_end + 1] == "else"
            ir["br"] += 3 if has_else else 2
            ir["total_blocks"] += 3 if has_else else 2
        elif tok == "for":
            ir["br"] += 3
            ir["total_blocks"] += 3

    mem = g["mem"]
    g["comp_mem_ratio"] = g["comp"] / mem if mem else 0.0
    g["coalesced_mem_ratio"] = g["coalesced"] / mem if mem else 0.0
    ir["total_insts"] = sum(ir[k] for k in IRCOUNT[:13])
    ir["total_blocks"] += 1
    ir["total_funcs"] = 1
    return [float(g[k]) for k in GREWE], [float(ir[k]) for k in IRCOUNT]


def main():
    root = Path(__file__).resolve().parents[1] / "data"
    out = {}
    for path in sorted((root / "golden").glob("*.kl")):
        grewe, ircount = features(path.read_text())
        out[path.name] = {"grewe": grewe, "ircount": ircount}
    target = root / "golden_features.json"
    target.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(out)} vectors to {target}", file=sys.stderr)


if __name__ == "__main__":
    main()
