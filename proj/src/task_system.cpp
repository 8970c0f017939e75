#include "taskspace/task_system.hpp"

#include "taskspace/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace taskspace {

namespace {

std::vector<TypeId> as_multiset(const std::vector<TypeId>& rhs) {
  auto sorted = rhs;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

TaskSystem::TaskSystem(std::vector<std::string> names, std::vector<Rule> rules, TypeId init)
    : names_(std::move(names)), init_(init) {
  const std::size_t n = names_.size();
  if (n == 0) throw Error(ErrorKind::InvalidSystem, "task system has no types");
  if (init_ >= n) throw Error(ErrorKind::InvalidSystem, "initial type out of range");
  {
    auto sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorKind::InvalidSystem, "duplicate type name");
  }

  std::vector<std::vector<Rule>> grouped(n);
  for (auto& r : rules) {
    if (r.lhs >= n) throw Error(ErrorKind::InvalidSystem, "rule lhs out of range");
    if (r.rhs.size() > 2)
      throw Error(ErrorKind::InvalidSystem, "rule for " + names_[r.lhs] + " has more than two children");
    for (TypeId c : r.rhs)
      if (c >= n) throw Error(ErrorKind::InvalidSystem, "rule rhs out of range");
    if (!(r.prob > 0.0) || !std::isfinite(r.prob))
      throw Error(ErrorKind::InvalidSystem, "rule for " + names_[r.lhs] + " has non-positive probability");

    auto& bucket = grouped[r.lhs];
    const auto key = as_multiset(r.rhs);
    auto same = std::find_if(bucket.begin(), bucket.end(),
                             [&](const Rule& o) { return as_multiset(o.rhs) == key; });
    if (same != bucket.end())
      same->prob += r.prob;
    else
      bucket.push_back(std::move(r));
  }

  offsets_.reserve(n + 1);
  for (TypeId t = 0; t < n; ++t) {
    if (grouped[t].empty()) throw Error(ErrorKind::InvalidSystem, "type " + names_[t] + " has no rules");
    double sum = 0.0;
    for (const auto& r : grouped[t]) sum += r.prob;
    if (std::abs(sum - 1.0) > kProbSumTol) {
      std::ostringstream os;
      os << "probabilities for " << names_[t] << " sum to " << sum;
      throw Error(ErrorKind::InvalidSystem, os.str());
    }
    offsets_.push_back(rules_.size());
    for (auto& r : grouped[t]) rules_.push_back(std::move(r));
  }
  offsets_.push_back(rules_.size());
}

std::span<const Rule> TaskSystem::rules_of(TypeId t) const {
  return std::span<const Rule>(rules_).subspan(offsets_.at(t), offsets_.at(t + 1) - offsets_.at(t));
}

std::optional<TypeId> TaskSystem::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<TypeId>(it - names_.begin());
}

bool TaskSystem::has_binary_rule(TypeId t) const {
  const auto rs = rules_of(t);
  return std::any_of(rs.begin(), rs.end(), [](const Rule& r) { return r.binary(); });
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(head) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '\'' || c == '.';
  });
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_probability(std::string_view s) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_number(s);
  auto num = parse_number(trim(s.substr(0, slash)));
  auto den = parse_number(trim(s.substr(slash + 1)));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

struct RawRule {
  std::string lhs;
  std::vector<std::string> rhs;
  double prob;
  std::size_t line;
};

}  // namespace

TaskSystem parse_task_system(std::string_view text) {
  std::vector<std::string> names;
  std::map<std::string, TypeId, std::less<>> index;
  auto intern = [&](std::string_view name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const TypeId id = names.size();
    names.emplace_back(name);
    index.emplace(std::string(name), id);
    return id;
  };

  std::vector<RawRule> raw;
  std::optional<std::string> init_name;
  std::size_t init_line = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t spos = 0;
    while (spos <= line.size()) {
      const auto semi = line.find(';', spos);
      std::string_view stmt =
          trim(line.substr(spos, semi == std::string_view::npos ? std::string_view::npos : semi - spos));
      spos = semi == std::string_view::npos ? line.size() + 1 : semi + 1;
      if (stmt.empty()) continue;

      const auto arrow = stmt.find("->");
      if (arrow == std::string_view::npos) {
        auto words = split_ws(stmt);
        if (words.size() == 2 && words[0] == "init") {
          if (init_name) throw ParseError(line_no, "duplicate init line");
          if (!is_identifier(words[1])) throw ParseError(line_no, "invalid type name '" + std::string(words[1]) + "'");
          init_name = std::string(words[1]);
          init_line = line_no;
          intern(words[1]);
          continue;
        }
        throw ParseError(line_no, "expected 'init <Name>' or '<Lhs> -> <rhs> : <prob>'");
      }

      const auto lhs = trim(stmt.substr(0, arrow));
      if (!is_identifier(lhs)) throw ParseError(line_no, "invalid lhs '" + std::string(lhs) + "'");
      auto rest = stmt.substr(arrow + 2);
      const auto colon = rest.rfind(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "missing ': <prob>'");
      auto prob = parse_probability(rest.substr(colon + 1));
      if (!prob) throw ParseError(line_no, "invalid probability '" + std::string(trim(rest.substr(colon + 1))) + "'");
      if (!(*prob > 0.0) || *prob > 1.0 + kProbSumTol)
        throw ParseError(line_no, "probability must lie in (0,1]");

      RawRule r{std::string(lhs), {}, *prob, line_no};
      intern(lhs);
      for (auto w : split_ws(rest.substr(0, colon))) {
        if (!is_identifier(w)) throw ParseError(line_no, "invalid type name '" + std::string(w) + "'");
        r.rhs.emplace_back(w);
        intern(w);
      }
      if (r.rhs.size() > 2) throw ParseError(line_no, "rule has more than two children");
      raw.push_back(std::move(r));
    }
  }

  if (raw.empty()) throw ParseError(line_no, "no rules");

  std::vector<bool> has_rule(names.size(), false);
  for (const auto& r : raw) has_rule[index.at(r.lhs)] = true;
  if (init_name && !has_rule[index.at(*init_name)])
    throw ParseError(init_line, "unknown init type '" + *init_name + "'");
  for (TypeId t = 0; t < names.size(); ++t)
    if (!has_rule[t]) throw ParseError(line_no, "type '" + names[t] + "' has no rules");

  std::vector<double> sums(names.size(), 0.0);
  std::vector<std::size_t> last_line(names.size(), 0);
  for (const auto& r : raw) {
    sums[index.at(r.lhs)] += r.prob;
    last_line[index.at(r.lhs)] = r.line;
  }
  for (TypeId t = 0; t < names.size(); ++t) {
    if (std::abs(sums[t] - 1.0) > kProbSumTol) {
      std::ostringstream os;
      os << "probabilities for " << names[t] << " sum to " << sums[t];
      throw ParseError(last_line[t], os.str());
    }
  }

  std::vector<Rule> rules;
  rules.reserve(raw.size());
  for (const auto& r : raw) {
    Rule rule;
    rule.lhs = index.at(r.lhs);
    for (const auto& c : r.rhs) rule.rhs.push_back(index.at(c));
    rule.prob = r.prob;
    rules.push_back(std::move(rule));
  }
  const TypeId init = init_name ? index.at(*init_name) : index.at(raw.front().lhs);

  try {
    return TaskSystem(std::move(names), std::move(rules), init);
  } catch (const Error& e) {
    throw ParseError(line_no, e.what());
  }
}

TaskSystem load_task_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_task_system(buf.str());
}

std::string to_text(const TaskSystem& ts) {
  std::ostringstream os;
  os.precision(17);
  os << "init " << ts.name(ts.init()) << '\n';
  for (const auto& r : ts.rules()) {
    os << ts.name(r.lhs) << " ->";
    for (TypeId c : r.rhs) os << ' ' << ts.name(c);
    os << " : " << r.prob << '\n';
  }
  return os.str();
}

}  // namespace taskspace
