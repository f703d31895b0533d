#pragma once

// Data model for raw game logs and featurized datasets, plus CSV ingestion.
//
// All values are immutable after construction. Currency is held as exact
// integer cents; the mined ultimatum rule branches on equality with zero,
// which must be exact.

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gamemine {

// ---------------------------------------------------------------------------
// Errors

// Positioned parse failure. Line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Gestures

// Nominal: equality only, no order between the three values.
enum class Gesture : std::uint8_t { rock = 0, paper = 1, scissors = 2 };

inline constexpr std::array<Gesture, 3> kAllGestures = {Gesture::rock, Gesture::paper,
                                                        Gesture::scissors};

inline constexpr char gesture_token(Gesture g) {
  switch (g) {
    case Gesture::rock: return 'R';
    case Gesture::paper: return 'P';
    case Gesture::scissors: return 'S';
  }
  return '?';
}

inline std::optional<Gesture> gesture_from_token(std::string_view token) {
  if (token == "R") return Gesture::rock;
  if (token == "P") return Gesture::paper;
  if (token == "S") return Gesture::scissors;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Money: exact fixed-point dollars (integer cents)

struct Money {
  std::int64_t cents = 0;

  friend constexpr auto operator<=>(const Money&, const Money&) = default;
};

inline constexpr Money money_from_cents(std::int64_t cents) { return Money{cents}; }

// Renders with exactly two fraction digits: "-1.35", "0.00", "1.45".
inline std::string to_string(Money m) {
  std::int64_t c = m.cents;
  std::string sign = c < 0 ? "-" : "";
  if (c < 0) c = -c;
  std::string frac = std::to_string(c % 100);
  if (frac.size() < 2) frac.insert(frac.begin(), '0');
  return sign + std::to_string(c / 100) + "." + frac;
}

namespace detail {

// Signed decimal with at most `max_frac` fraction digits, scaled to cents.
// strict_frac forces exactly two fraction digits (the CSV layout).
inline std::optional<Money> parse_money_impl(std::string_view s, bool strict_frac) {
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  std::int64_t whole = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    if (whole > 92233720368547757LL) return std::nullopt; // would overflow in cents
    whole = whole * 10 + (s[i] - '0');
    ++i;
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      if (frac_digits < 2) frac = frac * 10 + (s[i] - '0');
      ++frac_digits;
      ++i;
    }
    if (frac_digits == 0 || frac_digits > 2) return std::nullopt;
    if (frac_digits == 1) frac *= 10;
  }
  if (strict_frac && frac_digits != 2) return std::nullopt;
  if (i != s.size()) return std::nullopt;
  if (whole > 92233720368547757LL) return std::nullopt;
  std::int64_t cents = whole * 100 + frac;
  return Money{negative ? -cents : cents};
}

} // namespace detail

// CSV form: sign, digits, '.', exactly two fraction digits.
inline std::optional<Money> parse_money(std::string_view s) {
  return detail::parse_money_impl(s, /*strict_frac=*/true);
}

// ARFF form: integer or decimal with one or two fraction digits.
inline std::optional<Money> parse_money_lenient(std::string_view s) {
  return detail::parse_money_impl(s, /*strict_frac=*/false);
}

// ---------------------------------------------------------------------------
// Raw game logs

struct RpsTurn {
  int turn_index = 0;
  Gesture own = Gesture::rock;
  Gesture opp = Gesture::rock;

  friend bool operator==(const RpsTurn&, const RpsTurn&) = default;
};

// One subject's ordered turn sequence in one thread. Turns are contiguous
// from index 0.
struct Episode {
  std::string subject_id;
  std::string thread_id;
  std::vector<RpsTurn> turns;

  friend bool operator==(const Episode&, const Episode&) = default;
};

struct CtRecord {
  std::string subject_id;
  Money proposer_delta;
  Money responder_delta;
  bool accepted = false;

  friend bool operator==(const CtRecord&, const CtRecord&) = default;
};

struct MoneyRange {
  Money lo;
  Money hi;
};

// ---------------------------------------------------------------------------
// Featurized datasets

enum class AttrKind : std::uint8_t { nominal = 0, numeric = 1 };

struct Attribute {
  std::string name;
  AttrKind kind = AttrKind::nominal;
  std::vector<std::string> values; // nominal only; non-empty, duplicate-free

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

inline Attribute nominal_attribute(std::string name, std::vector<std::string> values) {
  if (values.empty()) throw std::invalid_argument("nominal attribute needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j])
        throw std::invalid_argument("duplicate nominal value '" + values[i] + "'");
  return Attribute{std::move(name), AttrKind::nominal, std::move(values)};
}

inline Attribute numeric_attribute(std::string name) {
  return Attribute{std::move(name), AttrKind::numeric, {}};
}

// One dataset cell. Nominal cells hold an index into the attribute's declared
// value list; numeric cells hold exact cents.
struct Cell {
  AttrKind kind = AttrKind::nominal;
  std::int64_t raw = 0;

  static Cell nominal(std::size_t value_index) {
    return Cell{AttrKind::nominal, static_cast<std::int64_t>(value_index)};
  }
  static Cell numeric(Money m) { return Cell{AttrKind::numeric, m.cents}; }

  std::size_t nominal_index() const { return static_cast<std::size_t>(raw); }
  Money money() const { return Money{raw}; }

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

using Instance = std::vector<Cell>;

// Instance order is significant and preserved by every operation; the
// cross-validation protocol folds on contiguous ranges of this order.
struct Dataset {
  std::string relation;
  std::vector<Attribute> schema;
  std::size_t class_attribute = 0;
  std::vector<Instance> instances;

  const Attribute& class_attr() const { return schema.at(class_attribute); }
  std::size_t n_classes() const { return class_attr().values.size(); }
  std::size_t class_index_of(const Instance& inst) const {
    return inst[class_attribute].nominal_index();
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline void validate_cell(const Attribute& attr, const Cell& cell) {
  if (cell.kind != attr.kind)
    throw std::invalid_argument("cell kind mismatch for attribute '" + attr.name + "'");
  if (attr.kind == AttrKind::nominal &&
      (cell.raw < 0 || cell.nominal_index() >= attr.values.size()))
    throw std::invalid_argument("nominal value out of range for attribute '" + attr.name + "'");
}

inline void validate_instance(const Dataset& d, const Instance& inst) {
  if (inst.size() != d.schema.size())
    throw std::invalid_argument("instance arity does not match schema");
  for (std::size_t a = 0; a < d.schema.size(); ++a) validate_cell(d.schema[a], inst[a]);
}

inline void validate_dataset(const Dataset& d) {
  if (d.schema.empty()) throw std::invalid_argument("dataset schema is empty");
  if (d.class_attribute >= d.schema.size())
    throw std::invalid_argument("class attribute index out of range");
  if (d.class_attr().kind != AttrKind::nominal)
    throw std::invalid_argument("class attribute must be nominal");
  for (const Instance& inst : d.instances) validate_instance(d, inst);
}

inline std::string cell_to_string(const Attribute& attr, const Cell& cell) {
  return attr.kind == AttrKind::nominal ? attr.values[cell.nominal_index()]
                                        : to_string(cell.money());
}

// ---------------------------------------------------------------------------
// CSV parsing

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

// Reads one line, tolerating a trailing CR from CRLF input.
inline bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

} // namespace detail

inline constexpr std::string_view kRpsCsvHeader = "subject_id,thread_id,turn_index,own,opp";
inline constexpr std::string_view kCtCsvHeader = "subject_id,proposer_delta,responder_delta,accepted";

// Parses the RPS CSV layout. Rows may arrive in any order; episodes are
// grouped by (subject_id, thread_id) in order of first appearance, turns
// sorted by turn_index and validated contiguous from 0.
inline std::vector<Episode> parse_rps_log(std::istream& in) {
  std::string line;
  if (!detail::next_line(in, line)) return {};
  if (line != kRpsCsvHeader)
    throw ParseError(1, "expected header '" + std::string(kRpsCsvHeader) + "'");

  struct PendingTurn {
    RpsTurn turn;
    std::size_t lineno;
  };
  struct PendingEpisode {
    std::string subject_id;
    std::string thread_id;
    std::vector<PendingTurn> turns;
  };
  std::vector<PendingEpisode> pending;
  std::map<std::pair<std::string, std::string>, std::size_t> index;

  std::size_t lineno = 1;
  while (detail::next_line(in, line)) {
    ++lineno;
    if (line.empty()) throw ParseError(lineno, "empty row");
    std::vector<std::string> f = detail::split_csv(line);
    if (f.size() != 5)
      throw ParseError(lineno, "expected 5 fields, got " + std::to_string(f.size()));

    int turn_index = 0;
    try {
      std::size_t pos = 0;
      turn_index = std::stoi(f[2], &pos);
      if (pos != f[2].size() || turn_index < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError(lineno, "invalid turn_index '" + f[2] + "'");
    }
    std::optional<Gesture> own = gesture_from_token(f[3]);
    if (!own) throw ParseError(lineno, "unknown gesture token '" + f[3] + "'");
    std::optional<Gesture> opp = gesture_from_token(f[4]);
    if (!opp) throw ParseError(lineno, "unknown gesture token '" + f[4] + "'");

    auto key = std::make_pair(f[0], f[1]);
    auto [it, inserted] = index.try_emplace(key, pending.size());
    if (inserted) pending.push_back(PendingEpisode{f[0], f[1], {}});
    pending[it->second].turns.push_back(PendingTurn{RpsTurn{turn_index, *own, *opp}, lineno});
  }

  std::vector<Episode> episodes;
  episodes.reserve(pending.size());
  for (PendingEpisode& pe : pending) {
    std::sort(pe.turns.begin(), pe.turns.end(), [](const PendingTurn& a, const PendingTurn& b) {
      return a.turn.turn_index != b.turn.turn_index ? a.turn.turn_index < b.turn.turn_index
                                                    : a.lineno < b.lineno;
    });
    Episode ep{pe.subject_id, pe.thread_id, {}};
    ep.turns.reserve(pe.turns.size());
    for (std::size_t i = 0; i < pe.turns.size(); ++i) {
      const PendingTurn& pt = pe.turns[i];
      if (i > 0 && pt.turn.turn_index == pe.turns[i - 1].turn.turn_index)
        throw ParseError(pt.lineno, "duplicate turn_index " + std::to_string(pt.turn.turn_index) +
                                        " in episode (" + pe.subject_id + "," + pe.thread_id + ")");
      if (pt.turn.turn_index != static_cast<int>(i))
        throw ParseError(pt.lineno, "non-contiguous turn_index " +
                                        std::to_string(pt.turn.turn_index) + " in episode (" +
                                        pe.subject_id + "," + pe.thread_id + "), expected " +
                                        std::to_string(i));
      ep.turns.push_back(pt.turn);
    }
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

// Parses the CT CSV layout. Optional bounds reject out-of-range responder
// deltas at parse time.
inline std::vector<CtRecord> parse_ct_log(std::istream& in,
                                          std::optional<MoneyRange> responder_bounds = {}) {
  std::string line;
  if (!detail::next_line(in, line)) return {};
  if (line != kCtCsvHeader)
    throw ParseError(1, "expected header '" + std::string(kCtCsvHeader) + "'");

  std::vector<CtRecord> records;
  std::size_t lineno = 1;
  while (detail::next_line(in, line)) {
    ++lineno;
    if (line.empty()) throw ParseError(lineno, "empty row");
    std::vector<std::string> f = detail::split_csv(line);
    if (f.size() != 4)
      throw ParseError(lineno, "expected 4 fields, got " + std::to_string(f.size()));

    std::optional<Money> proposer = parse_money(f[1]);
    if (!proposer) throw ParseError(lineno, "invalid proposer_delta '" + f[1] + "'");
    std::optional<Money> responder = parse_money(f[2]);
    if (!responder) throw ParseError(lineno, "invalid responder_delta '" + f[2] + "'");
    bool accepted = false;
    if (f[3] == "true") {
      accepted = true;
    } else if (f[3] == "false") {
      accepted = false;
    } else {
      throw ParseError(lineno, "invalid accepted flag '" + f[3] + "' (expected true|false)");
    }
    if (responder_bounds &&
        (*responder < responder_bounds->lo || responder_bounds->hi < *responder))
      throw ParseError(lineno, "responder_delta " + to_string(*responder) + " outside bounds [" +
                                   to_string(responder_bounds->lo) + "," +
                                   to_string(responder_bounds->hi) + "]");
    records.push_back(CtRecord{f[0], *proposer, *responder, accepted});
  }
  return records;
}

// ---------------------------------------------------------------------------
// CSV writing (the synthetic generators emit the same layout the parsers read)

inline std::string write_rps_csv(const std::vector<Episode>& episodes) {
  std::string out(kRpsCsvHeader);
  out += '\n';
  for (const Episode& ep : episodes) {
    for (const RpsTurn& t : ep.turns) {
      out += ep.subject_id;
      out += ',';
      out += ep.thread_id;
      out += ',';
      out += std::to_string(t.turn_index);
      out += ',';
      out += gesture_token(t.own);
      out += ',';
      out += gesture_token(t.opp);
      out += '\n';
    }
  }
  return out;
}

inline std::string write_ct_csv(const std::vector<CtRecord>& records) {
  std::string out(kCtCsvHeader);
  out += '\n';
  for (const CtRecord& r : records) {
    out += r.subject_id;
    out += ',';
    out += to_string(r.proposer_delta);
    out += ',';
    out += to_string(r.responder_delta);
    out += ',';
    out += r.accepted ? "true" : "false";
    out += '\n';
  }
  return out;
}

} // namespace gamemine
