#pragma once

// ARFF interchange, restricted to the subset the pipeline produces: nominal
// and numeric attributes, dense comma-separated rows, '%' comments. Numeric
// values are fixed-point decimals with at most two fraction digits. The
// writer emits a '%@class <name>' directive so a class attribute that is not
// the last column survives the round trip; files without the directive
// default to the last attribute.

#include <cctype>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>

#include "gamemine/gamedata.hpp"
#include "gamemine/version.hpp"

namespace gamemine {

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool starts_with_keyword(const std::string& lower_line, std::string_view keyword) {
  return lower_line.rfind(keyword, 0) == 0;
}

} // namespace detail

inline std::string write_arff(const Dataset& d) {
  validate_dataset(d);
  std::string out;
  out += "% ";
  out += kToolkitName;
  out += ' ';
  out += kToolkitVersion;
  out += '\n';
  out += "@relation ";
  out += d.relation;
  out += '\n';
  for (const Attribute& attr : d.schema) {
    out += "@attribute ";
    out += attr.name;
    if (attr.kind == AttrKind::numeric) {
      out += " numeric";
    } else {
      out += " {";
      for (std::size_t i = 0; i < attr.values.size(); ++i) {
        if (i > 0) out += ',';
        out += attr.values[i];
      }
      out += '}';
    }
    out += '\n';
  }
  out += "%@class ";
  out += d.class_attr().name;
  out += '\n';
  out += "@data\n";
  for (const Instance& inst : d.instances) {
    for (std::size_t a = 0; a < inst.size(); ++a) {
      if (a > 0) out += ',';
      out += cell_to_string(d.schema[a], inst[a]);
    }
    out += '\n';
  }
  return out;
}

inline Dataset read_arff(std::istream& in) {
  Dataset d;
  std::string class_name;
  bool seen_relation = false;
  bool in_data = false;
  std::string line;
  std::size_t lineno = 0;

  while (detail::next_line(in, line)) {
    ++lineno;
    std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed[0] == '%') {
      std::string lower = detail::to_lower(trimmed);
      if (detail::starts_with_keyword(lower, "%@class")) {
        class_name = detail::trim(trimmed.substr(7));
        if (class_name.empty()) throw ParseError(lineno, "%@class directive names no attribute");
      }
      continue;
    }
    std::string lower = detail::to_lower(trimmed);
    if (!in_data) {
      if (detail::starts_with_keyword(lower, "@relation")) {
        d.relation = detail::trim(trimmed.substr(9));
        seen_relation = true;
      } else if (detail::starts_with_keyword(lower, "@attribute")) {
        std::string rest = detail::trim(trimmed.substr(10));
        std::size_t space = rest.find_first_of(" \t");
        if (space == std::string::npos)
          throw ParseError(lineno, "@attribute needs a name and a type");
        std::string name = rest.substr(0, space);
        std::string type = detail::trim(rest.substr(space));
        if (detail::to_lower(type) == "numeric") {
          d.schema.push_back(numeric_attribute(name));
        } else if (!type.empty() && type.front() == '{' && type.back() == '}') {
          std::vector<std::string> values;
          for (const std::string& raw :
               detail::split_csv(type.substr(1, type.size() - 2))) {
            std::string v = detail::trim(raw);
            if (v.empty()) throw ParseError(lineno, "empty nominal value");
            if (v.find('\'') != std::string::npos || v.find('"') != std::string::npos)
              throw ParseError(lineno, "unsupported quoted nominal value");
            values.push_back(v);
          }
          try {
            d.schema.push_back(nominal_attribute(name, std::move(values)));
          } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, e.what());
          }
        } else {
          throw ParseError(lineno, "unsupported attribute type '" + type + "'");
        }
      } else if (detail::starts_with_keyword(lower, "@data")) {
        if (!seen_relation) throw ParseError(lineno, "@data before @relation");
        if (d.schema.empty()) throw ParseError(lineno, "@data with no attributes");
        in_data = true;
      } else {
        throw ParseError(lineno, "unsupported ARFF construct: " + trimmed);
      }
      continue;
    }

    // data row
    if (trimmed.front() == '{')
      throw ParseError(lineno, "unsupported sparse ARFF row");
    std::vector<std::string> fields = detail::split_csv(trimmed);
    if (fields.size() != d.schema.size())
      throw ParseError(lineno, "expected " + std::to_string(d.schema.size()) + " values, got " +
                                   std::to_string(fields.size()));
    Instance inst;
    inst.reserve(fields.size());
    for (std::size_t a = 0; a < fields.size(); ++a) {
      std::string v = detail::trim(fields[a]);
      const Attribute& attr = d.schema[a];
      if (v == "?") throw ParseError(lineno, "missing values are not supported");
      if (attr.kind == AttrKind::numeric) {
        std::optional<Money> m = parse_money_lenient(v);
        if (!m) throw ParseError(lineno, "invalid numeric value '" + v + "'");
        inst.push_back(Cell::numeric(*m));
      } else {
        auto it = std::find(attr.values.begin(), attr.values.end(), v);
        if (it == attr.values.end())
          throw ParseError(lineno,
                           "value '" + v + "' not declared for attribute '" + attr.name + "'");
        inst.push_back(Cell::nominal(static_cast<std::size_t>(it - attr.values.begin())));
      }
    }
    d.instances.push_back(std::move(inst));
  }

  if (!in_data) throw ParseError(lineno > 0 ? lineno : 1, "missing @data section");
  if (class_name.empty()) {
    d.class_attribute = d.schema.size() - 1;
  } else {
    bool found = false;
    for (std::size_t a = 0; a < d.schema.size(); ++a) {
      if (d.schema[a].name == class_name) {
        d.class_attribute = a;
        found = true;
        break;
      }
    }
    if (!found) throw ParseError(lineno, "%@class names unknown attribute '" + class_name + "'");
  }
  validate_dataset(d);
  return d;
}

inline Dataset read_arff(const std::string& text) {
  std::istringstream in(text);
  return read_arff(in);
}

} // namespace gamemine
