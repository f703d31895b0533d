#pragma once

// Plain-text model persistence. One key per line; names and nominal values
// are stored as the remainder of their line, so they may contain interior
// spaces. Doubles are written with %.17g and parse back bit-identical.
// The leading "gamemine-model <version>" line gates compatibility.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gamemine/classifiers.hpp"
#include "gamemine/gamedata.hpp"

namespace gamemine {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ModelWriter {
  std::ostream& out;

  void kv(std::string_view key, std::string_view rest) {
    out << key;
    if (!rest.empty()) out << ' ' << rest;
    out << '\n';
  }
  void kvd(std::string_view key, double v) { kv(key, g17(v)); }
};

struct ModelReader {
  std::istream& in;
  std::size_t lineno = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineno, msg); }

  // Returns the payload after `key`, failing on EOF or key mismatch.
  std::string expect(std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) {
      ++lineno;
      fail("unexpected end of model file, wanted '" + std::string(key) + "'");
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t sp = line.find(' ');
    const std::string head = line.substr(0, sp);
    if (head != key)
      fail("expected '" + std::string(key) + "', found '" + head + "'");
    return sp == std::string::npos ? std::string() : line.substr(sp + 1);
  }

  std::uint64_t expect_u64(std::string_view key) {
    const std::string rest = expect(key);
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(rest, &pos);
      if (pos != rest.size()) fail("trailing characters after '" + std::string(key) + "'");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("bad integer for '" + std::string(key) + "': " + rest);
    }
  }

  std::int64_t expect_i64(std::string_view key) {
    const std::string rest = expect(key);
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(rest, &pos);
      if (pos != rest.size()) fail("trailing characters after '" + std::string(key) + "'");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("bad integer for '" + std::string(key) + "': " + rest);
    }
  }

  std::size_t expect_index(std::string_view key, std::size_t limit) {
    const std::uint64_t v = expect_u64(key);
    if (v >= limit) fail("index out of range for '" + std::string(key) + "'");
    return static_cast<std::size_t>(v);
  }

  double expect_double(std::string_view key) {
    const std::string rest = expect(key);
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end != rest.c_str() + rest.size() || rest.empty())
      fail("bad number for '" + std::string(key) + "': " + rest);
    return v;
  }

  std::uint64_t tok_u64(const std::string& s) {
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(s, &pos);
      if (pos != s.size()) fail("bad integer token: " + s);
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("bad integer token: " + s);
    }
  }

  std::int64_t tok_i64(const std::string& s) {
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(s, &pos);
      if (pos != s.size()) fail("bad integer token: " + s);
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("bad integer token: " + s);
    }
  }

  double tok_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) fail("bad number token: " + s);
    return v;
  }
};

inline void write_state(ModelWriter& w, const TrainedModel& m) {
  if (const auto* s = std::get_if<ZeroRModel>(&m.state)) {
    w.kv("state", "zero_r");
    w.kv("majority", std::to_string(s->majority_class));
  } else if (const auto* s = std::get_if<UniformRandomModel>(&m.state)) {
    w.kv("state", "uniform_random");
    w.kv("draw_seed", std::to_string(s->seed));
    w.kv("draw_classes", std::to_string(s->n_classes));
  } else if (const auto* s = std::get_if<OneRModel>(&m.state)) {
    w.kv("state", "one_r");
    w.kv("attribute_index", std::to_string(s->attribute_index));
    w.kv("kind", s->numeric ? "numeric" : "nominal");
    w.kv("map_size", std::to_string(s->value_map.size()));
    for (const auto& entry : s->value_map)
      w.kv("map_entry", entry ? std::to_string(*entry) : std::string("-"));
    w.kv("cuts", std::to_string(s->numeric_cuts.size()));
    for (Money cut : s->numeric_cuts) w.kv("cut", std::to_string(cut.cents));
    w.kv("bins", std::to_string(s->bin_classes.size()));
    for (std::size_t c : s->bin_classes) w.kv("bin", std::to_string(c));
    w.kv("default", std::to_string(s->default_class));
  } else if (const auto* s = std::get_if<DecisionTableModel>(&m.state)) {
    w.kv("state", "decision_table");
    std::string sel;
    for (std::size_t a : s->selected_attributes) {
      if (!sel.empty()) sel += ' ';
      sel += std::to_string(a);
    }
    w.kv("selected", std::to_string(s->selected_attributes.size()) +
                         (sel.empty() ? "" : " " + sel));
    w.kv("rows", std::to_string(s->table.size()));
    for (const auto& [key, klass] : s->table) {
      std::string row;
      for (const Cell& cell : key) row += std::to_string(cell.raw) + ' ';
      row += std::to_string(klass);
      w.kv("row", row);
    }
    w.kv("majority", std::to_string(s->global_majority));
  } else if (const auto* s = std::get_if<SmoModel>(&m.state)) {
    w.kv("state", "smo");
    w.kv("kernel", s->kernel.type == KernelType::linear
                       ? std::string("linear")
                       : "polynomial " + std::to_string(s->kernel.degree));
    w.kv("pairs", std::to_string(s->pairwise.size()));
    for (const SmoPairModel& pair : s->pairwise) {
      w.kv("pair", std::to_string(pair.neg_class) + ' ' + std::to_string(pair.pos_class) + ' ' +
                       (pair.degenerate ? '1' : '0') + ' ' + std::to_string(pair.constant_class));
      std::size_t n_extrema = 0;
      for (const auto& ex : pair.encoder.numeric_extrema)
        if (ex) ++n_extrema;
      w.kv("extrema", std::to_string(n_extrema));
      for (std::size_t a = 0; a < pair.encoder.numeric_extrema.size(); ++a)
        if (const auto& ex = pair.encoder.numeric_extrema[a])
          w.kv("extremum", std::to_string(a) + ' ' + std::to_string(ex->lo.cents) + ' ' +
                               std::to_string(ex->hi.cents));
      const std::size_t dim = pair.support_points.empty() ? 0 : pair.support_points[0].size();
      w.kv("support", std::to_string(pair.support_points.size()) + ' ' + std::to_string(dim));
      for (std::size_t i = 0; i < pair.support_points.size(); ++i) {
        std::string row = g17(pair.coefficients[i]);
        for (double x : pair.support_points[i]) row += ' ' + g17(x);
        w.kv("sv", row);
      }
      w.kvd("bias", pair.bias);
    }
  } else if (const auto* s = std::get_if<EquilibriumResponderModel>(&m.state)) {
    w.kv("state", "equilibrium_responder");
    w.kv("responder", std::to_string(s->responder_attribute));
    w.kv("accept", std::to_string(s->accept_class));
    w.kv("reject", std::to_string(s->reject_class));
  }
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

inline ModelState read_state(ModelReader& r, const TrainedModel& shell) {
  const std::size_t n_attrs = shell.schema.size();
  const std::size_t n_classes = shell.schema[shell.class_attribute].values.size();
  const std::string kind = r.expect("state");
  if (kind == "zero_r") {
    ZeroRModel s;
    s.majority_class = r.expect_index("majority", n_classes);
    return s;
  }
  if (kind == "uniform_random") {
    UniformRandomModel s;
    s.seed = r.expect_u64("draw_seed");
    s.n_classes = static_cast<std::size_t>(r.expect_u64("draw_classes"));
    if (s.n_classes != n_classes) r.fail("draw_classes does not match the class attribute");
    return s;
  }
  if (kind == "one_r") {
    OneRModel s;
    s.attribute_index = r.expect_index("attribute_index", n_attrs);
    const std::string k = r.expect("kind");
    if (k != "nominal" && k != "numeric") r.fail("bad one_r kind: " + k);
    s.numeric = k == "numeric";
    const std::uint64_t n_map = r.expect_u64("map_size");
    for (std::uint64_t i = 0; i < n_map; ++i) {
      const std::string entry = r.expect("map_entry");
      if (entry == "-") {
        s.value_map.emplace_back();
      } else {
        const std::uint64_t c = r.tok_u64(entry);
        if (c >= n_classes) r.fail("bad map_entry: " + entry);
        s.value_map.emplace_back(static_cast<std::size_t>(c));
      }
    }
    const std::uint64_t n_cuts = r.expect_u64("cuts");
    for (std::uint64_t i = 0; i < n_cuts; ++i) s.numeric_cuts.push_back(Money{r.expect_i64("cut")});
    const std::uint64_t n_bins = r.expect_u64("bins");
    for (std::uint64_t i = 0; i < n_bins; ++i)
      s.bin_classes.push_back(r.expect_index("bin", n_classes));
    s.default_class = r.expect_index("default", n_classes);
    if (s.numeric && s.bin_classes.size() != s.numeric_cuts.size() + 1)
      r.fail("bin count must be cut count plus one");
    return s;
  }
  if (kind == "decision_table") {
    DecisionTableModel s;
    const std::vector<std::string> sel = split_ws(r.expect("selected"));
    if (sel.empty()) r.fail("missing selected count");
    const std::size_t n_sel = static_cast<std::size_t>(r.tok_u64(sel[0]));
    if (sel.size() != n_sel + 1) r.fail("selected count does not match entries");
    for (std::size_t i = 1; i < sel.size(); ++i) {
      const std::size_t a = static_cast<std::size_t>(r.tok_u64(sel[i]));
      if (a >= n_attrs) r.fail("selected attribute out of range");
      s.selected_attributes.push_back(a);
    }
    const std::uint64_t n_rows = r.expect_u64("rows");
    for (std::uint64_t i = 0; i < n_rows; ++i) {
      const std::vector<std::string> row = split_ws(r.expect("row"));
      if (row.size() != s.selected_attributes.size() + 1) r.fail("bad row arity");
      std::vector<Cell> key;
      for (std::size_t j = 0; j < s.selected_attributes.size(); ++j) {
        const Attribute& attr = shell.schema[s.selected_attributes[j]];
        const std::int64_t raw = r.tok_i64(row[j]);
        Cell cell = attr.kind == AttrKind::nominal
                        ? Cell::nominal(static_cast<std::size_t>(raw))
                        : Cell::numeric(Money{raw});
        try {
          validate_cell(attr, cell);
        } catch (const std::exception& e) {
          r.fail(e.what());
        }
        key.push_back(cell);
      }
      const std::size_t klass = static_cast<std::size_t>(r.tok_u64(row.back()));
      if (klass >= n_classes) r.fail("row class out of range");
      s.table[key] = klass;
    }
    s.global_majority = r.expect_index("majority", n_classes);
    return s;
  }
  if (kind == "smo") {
    SmoModel s;
    const std::vector<std::string> kt = split_ws(r.expect("kernel"));
    if (kt.size() == 1 && kt[0] == "linear") {
      s.kernel = KernelSpec{KernelType::linear, 2};
    } else if (kt.size() == 2 && kt[0] == "polynomial") {
      s.kernel = KernelSpec{KernelType::polynomial, static_cast<int>(r.tok_i64(kt[1]))};
    } else {
      r.fail("bad kernel line");
    }
    const std::uint64_t n_pairs = r.expect_u64("pairs");
    for (std::uint64_t p = 0; p < n_pairs; ++p) {
      SmoPairModel pair;
      const std::vector<std::string> ph = split_ws(r.expect("pair"));
      if (ph.size() != 4) r.fail("bad pair line");
      pair.neg_class = static_cast<std::size_t>(r.tok_u64(ph[0]));
      pair.pos_class = static_cast<std::size_t>(r.tok_u64(ph[1]));
      pair.degenerate = ph[2] == "1";
      pair.constant_class = static_cast<std::size_t>(r.tok_u64(ph[3]));
      if (pair.neg_class >= n_classes || pair.pos_class >= n_classes ||
          pair.constant_class >= n_classes)
        r.fail("pair class out of range");
      pair.encoder.numeric_extrema.resize(n_attrs);
      const std::uint64_t n_ex = r.expect_u64("extrema");
      for (std::uint64_t i = 0; i < n_ex; ++i) {
        const std::vector<std::string> ex = split_ws(r.expect("extremum"));
        if (ex.size() != 3) r.fail("bad extremum line");
        const std::size_t a = static_cast<std::size_t>(r.tok_u64(ex[0]));
        if (a >= n_attrs) r.fail("extremum attribute out of range");
        pair.encoder.numeric_extrema[a] =
            FeatureEncoder::Extrema{Money{r.tok_i64(ex[1])}, Money{r.tok_i64(ex[2])}};
      }
      const std::vector<std::string> sh = split_ws(r.expect("support"));
      if (sh.size() != 2) r.fail("bad support line");
      const std::size_t n_sv = static_cast<std::size_t>(r.tok_u64(sh[0]));
      const std::size_t dim = static_cast<std::size_t>(r.tok_u64(sh[1]));
      for (std::size_t i = 0; i < n_sv; ++i) {
        const std::vector<std::string> sv = split_ws(r.expect("sv"));
        if (sv.size() != dim + 1) r.fail("bad sv arity");
        pair.coefficients.push_back(r.tok_double(sv[0]));
        std::vector<double> x;
        for (std::size_t j = 1; j < sv.size(); ++j) x.push_back(r.tok_double(sv[j]));
        pair.support_points.push_back(std::move(x));
      }
      pair.bias = r.expect_double("bias");
      s.pairwise.push_back(std::move(pair));
    }
    return s;
  }
  if (kind == "equilibrium_responder") {
    EquilibriumResponderModel s;
    s.responder_attribute = r.expect_index("responder", n_attrs);
    s.accept_class = r.expect_index("accept", n_classes);
    s.reject_class = r.expect_index("reject", n_classes);
    return s;
  }
  r.fail("unknown model state kind: " + kind);
}

} // namespace detail

inline void write_model(std::ostream& out, const TrainedModel& m) {
  detail::ModelWriter w{out};
  w.kv("gamemine-model", std::to_string(kModelFormatVersion));
  w.kv("classifier", classifier_id_name(m.spec.id));
  w.kv("seed", std::to_string(m.spec.seed));
  w.kv("min_bucket", std::to_string(m.spec.one_r.min_bucket));
  w.kvd("smo_c", m.spec.smo.c);
  w.kvd("smo_tolerance", m.spec.smo.tolerance);
  w.kvd("smo_eps", m.spec.smo.eps);
  w.kv("smo_kernel", m.spec.smo.kernel.type == KernelType::linear
                         ? std::string("linear")
                         : "polynomial " + std::to_string(m.spec.smo.kernel.degree));
  w.kv("smo_seed", std::to_string(m.spec.smo.seed));
  w.kv("class_attribute", std::to_string(m.class_attribute));
  w.kv("attributes", std::to_string(m.schema.size()));
  for (const Attribute& attr : m.schema) {
    if (attr.kind == AttrKind::nominal) {
      w.kv("attribute", "nominal " + attr.name);
      w.kv("values", std::to_string(attr.values.size()));
      for (const std::string& v : attr.values) w.kv("value", v);
    } else {
      w.kv("attribute", "numeric " + attr.name);
    }
  }
  detail::write_state(w, m);
  w.kv("end", "");
}

inline std::string write_model(const TrainedModel& m) {
  std::ostringstream oss;
  write_model(oss, m);
  return oss.str();
}

inline TrainedModel read_model(std::istream& in) {
  detail::ModelReader r{in};
  const std::string version = r.expect("gamemine-model");
  if (version != std::to_string(kModelFormatVersion))
    r.fail("unsupported model format version: " + version);

  TrainedModel m;
  const std::string cname = r.expect("classifier");
  const auto id = classifier_id_from_name(cname);
  if (!id) r.fail("unknown classifier: " + cname);
  m.spec.id = *id;
  m.spec.seed = r.expect_u64("seed");
  const std::int64_t mb = r.expect_i64("min_bucket");
  if (mb < 1) r.fail("min_bucket must be positive");
  m.spec.one_r.min_bucket = static_cast<int>(mb);
  m.spec.smo.c = r.expect_double("smo_c");
  m.spec.smo.tolerance = r.expect_double("smo_tolerance");
  m.spec.smo.eps = r.expect_double("smo_eps");
  const std::vector<std::string> kt = detail::split_ws(r.expect("smo_kernel"));
  if (kt.size() == 1 && kt[0] == "linear") {
    m.spec.smo.kernel = KernelSpec{KernelType::linear, 2};
  } else if (kt.size() == 2 && kt[0] == "polynomial") {
    m.spec.smo.kernel = KernelSpec{KernelType::polynomial, static_cast<int>(r.tok_i64(kt[1]))};
  } else {
    r.fail("bad smo_kernel line");
  }
  m.spec.smo.seed = r.expect_u64("smo_seed");

  const std::uint64_t class_attr = r.expect_u64("class_attribute");
  const std::uint64_t n_attrs = r.expect_u64("attributes");
  if (n_attrs == 0) r.fail("model needs at least one attribute");
  if (class_attr >= n_attrs) r.fail("class_attribute out of range");
  m.class_attribute = static_cast<std::size_t>(class_attr);
  for (std::uint64_t a = 0; a < n_attrs; ++a) {
    const std::string head = r.expect("attribute");
    const std::size_t sp = head.find(' ');
    const std::string kind = head.substr(0, sp);
    if (sp == std::string::npos || sp + 1 >= head.size()) r.fail("attribute line missing name");
    const std::string name = head.substr(sp + 1);
    if (kind == "nominal") {
      const std::uint64_t n_values = r.expect_u64("values");
      std::vector<std::string> values;
      for (std::uint64_t v = 0; v < n_values; ++v) values.push_back(r.expect("value"));
      try {
        m.schema.push_back(nominal_attribute(name, values));
      } catch (const std::exception& e) {
        r.fail(e.what());
      }
    } else if (kind == "numeric") {
      m.schema.push_back(numeric_attribute(name));
    } else {
      r.fail("bad attribute kind: " + kind);
    }
  }
  if (m.schema[m.class_attribute].kind != AttrKind::nominal)
    r.fail("class attribute must be nominal");

  m.state = detail::read_state(r, m);
  r.expect("end");
  return m;
}

inline TrainedModel read_model(const std::string& text) {
  std::istringstream iss(text);
  return read_model(iss);
}

} // namespace gamemine
