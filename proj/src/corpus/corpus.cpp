#include "steerbench/corpus/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"

namespace steerbench::corpus {

namespace fs = std::filesystem;

nlohmann::ordered_json CorpusStats::to_json() const {
  nlohmann::ordered_json doc;
  doc["total_files"] = total_files;
  doc["total_kernels"] = total_kernels;
  doc["valid_kernels"] = valid_kernels;
  doc["unique_kernels"] = unique_kernels;
  doc["compilation_rate"] = compilation_rate;
  return doc;
}

std::vector<std::string> split_kernels(std::string_view file_text) {
  auto lexed = frontend::lex(file_text);
  if (!lexed) {
    if (file_text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
    return {std::string(file_text)};
  }
  const auto& lx = lexed.value();
  std::vector<std::string> segments;
  std::size_t i = 0;
  while (i < lx.size()) {
    if (!(lx[i].kind == frontend::LexemeKind::keyword && lx[i].text == "kernel")) {
      ++i;
      continue;
    }
    const std::size_t begin = lx[i].offset;
    std::size_t j = i + 1;
    int depth = 0;
    bool opened = false;
    std::size_t end = file_text.size();
    for (; j < lx.size(); ++j) {
      if (lx[j].kind != frontend::LexemeKind::punct) {
        // A new top-level kernel before any body starts a new segment.
        if (!opened && lx[j].kind == frontend::LexemeKind::keyword && lx[j].text == "kernel") break;
        continue;
      }
      if (lx[j].text == "{") {
        ++depth;
        opened = true;
      } else if (lx[j].text == "}") {
        --depth;
        if (opened && depth == 0) {
          end = lx[j].offset + 1;
          ++j;
          break;
        }
      }
    }
    if (j < lx.size() && !opened) end = lx[j].offset;
    segments.emplace_back(file_text.substr(begin, end - begin));
    i = j;
  }
  return segments;
}

IngestResult ingest_corpus(const fs::path& directory) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw IoError("corpus directory '" + directory.string() + "' is not readable");
  std::vector<fs::path> files;
  for (fs::recursive_directory_iterator it(directory, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file() && it->path().extension() == ".kl") files.push_back(it->path());
  }
  if (ec) throw IoError("cannot enumerate '" + directory.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());

  IngestResult result;
  std::unordered_set<std::string> seen;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read '" + file.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    ++result.stats.total_files;
    for (const auto& segment : split_kernels(buffer.str())) {
      ++result.stats.total_kernels;
      auto v = frontend::validate(segment);
      if (!v.valid) continue;
      ++result.stats.valid_kernels;
      std::string canonical = frontend::render(*v.ast);
      if (seen.insert(canonical).second) {
        result.kernels.push_back({std::move(canonical), frontend::Origin::corpus});
      }
    }
  }
  result.stats.unique_kernels = result.kernels.size();
  if (result.stats.total_kernels > 0) {
    result.stats.compilation_rate =
        static_cast<double>(result.stats.valid_kernels) / static_cast<double>(result.stats.total_kernels);
  }
  return result;
}

std::uint64_t kernel_seed(std::uint64_t global_seed, std::string_view text) {
  return mix_seed(global_seed, fnv1a(text));
}

namespace {

using frontend::Expr;
using frontend::ExprKind;
using frontend::Stmt;

struct NameCollector {
  std::vector<std::string> names;  // first-appearance order
  std::set<std::string> seen;

  void add(const std::string& name) {
    if (seen.insert(name).second) names.push_back(name);
  }
  void stmts(const std::vector<Stmt>& list) {
    for (const auto& s : list) {
      if (s.kind == frontend::StmtKind::decl) add(s.name);
      stmts(s.init);
      stmts(s.body);
      stmts(s.else_body);
    }
  }
};

struct Renamer {
  const std::map<std::string, std::string>& mapping;

  void expr(Expr& e) const {
    if (e.kind == ExprKind::var || e.kind == ExprKind::index) e.text = mapping.at(e.text);
    for (auto& child : e.operands) expr(child);
  }
  void stmts(std::vector<Stmt>& list) const {
    for (auto& s : list) {
      if (s.kind == frontend::StmtKind::decl) s.name = mapping.at(s.name);
      if (s.target) expr(*s.target);
      if (s.value) expr(*s.value);
      if (s.cond) expr(*s.cond);
      stmts(s.init);
      stmts(s.step);
      stmts(s.body);
      stmts(s.else_body);
    }
  }
};

}  // namespace

SourceKernel rewrite_identifiers(const SourceKernel& kernel, std::uint64_t seed) {
  frontend::Ast ast = frontend::parse_valid(kernel.text);
  NameCollector collector;
  for (const auto& p : ast.params) collector.add(p.name);
  collector.stmts(ast.body);
  if (collector.names.size() > 26) {
    throw PreconditionError("kernel declares " + std::to_string(collector.names.size()) +
                            " distinct variables; at most 26 can be rewritten");
  }
  Rng rng(seed);
  std::string lower = "abcdefghijklmnopqrstuvwxyz";
  std::string upper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  rng.shuffle(lower.begin(), lower.end());
  rng.shuffle(upper.begin(), upper.end());

  std::map<std::string, std::string> mapping;
  for (std::size_t i = 0; i < collector.names.size(); ++i) mapping[collector.names[i]] = std::string(1, lower[i]);
  ast.name = std::string(1, upper[0]);
  for (auto& p : ast.params) p.name = mapping.at(p.name);
  Renamer{mapping}.stmts(ast.body);
  return {frontend::render(ast), kernel.origin};
}

Vocabulary build_vocabulary(std::span<const SourceKernel> kernels) {
  if (kernels.empty()) throw PreconditionError("cannot build a vocabulary from an empty corpus");
  std::set<std::string> tokens;
  for (auto& t : base_tokens()) tokens.insert(std::move(t));
  for (const auto& k : kernels) {
    for (auto& t : tokenize(k.text)) tokens.insert(std::move(t));
  }
  return Vocabulary(std::vector<std::string>(tokens.begin(), tokens.end()));
}

bool EncodedKernel::truncated(const Vocabulary&) const {
  return std::find(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(true_length), Vocabulary::end) ==
         ids.begin() + static_cast<std::ptrdiff_t>(true_length);
}

nlohmann::ordered_json EncodedKernel::to_json() const {
  nlohmann::ordered_json doc;
  doc["ids"] = ids;
  doc["true_length"] = true_length;
  return doc;
}

EncodedKernel EncodedKernel::from_json(const nlohmann::json& doc) {
  try {
    EncodedKernel k;
    k.ids = doc.at("ids").get<std::vector<TokenId>>();
    k.true_length = doc.at("true_length").get<std::size_t>();
    if (k.true_length > k.ids.size()) throw PreconditionError("true_length exceeds sequence length");
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed encoded kernel: ") + e.what());
  }
}

EncodedKernel encode_text(std::string_view text, const Vocabulary& vocab, std::size_t sequence_length) {
  if (sequence_length < 2) throw PreconditionError("sequence length must be at least 2");
  const auto tokens = tokenize(text);
  EncodedKernel out;
  out.ids.reserve(sequence_length);
  out.ids.push_back(Vocabulary::start);
  for (const auto& t : tokens) {
    const auto id = vocab.find(t);
    if (!id) throw PreconditionError("token '" + t + "' is not in the vocabulary");
    if (out.ids.size() < sequence_length) out.ids.push_back(*id);
  }
  if (out.ids.size() < sequence_length) out.ids.push_back(Vocabulary::end);
  out.true_length = out.ids.size();
  out.ids.resize(sequence_length, Vocabulary::pad);
  return out;
}

EncodedKernel encode(const SourceKernel& kernel, const Vocabulary& vocab, std::size_t sequence_length) {
  return encode_text(kernel.text, vocab, sequence_length);
}

namespace {

bool is_literal_char(const std::string& token) {
  return token.size() == 1 && (std::isdigit(static_cast<unsigned char>(token[0])) || token[0] == '.');
}

}  // namespace

std::string decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::string text;
  bool previous_literal = false;
  for (TokenId id : ids) {
    const std::string& token = vocab.token(id);
    if (id == Vocabulary::pad || id == Vocabulary::start || id == Vocabulary::end) continue;
    const bool literal = is_literal_char(token);
    if (!text.empty() && !(literal && previous_literal)) text.push_back(' ');
    text += token;
    previous_literal = literal;
  }
  return text;
}

void write_encoded_jsonl(const fs::path& path, std::span<const EncodedKernel> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& k : data) out << k.to_json().dump() << '\n';
}

std::vector<EncodedKernel> read_encoded_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::vector<EncodedKernel> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(EncodedKernel::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw PreconditionError("malformed line in '" + path.string() + "': " + e.what());
    }
  }
  return out;
}

}  // namespace steerbench::corpus
