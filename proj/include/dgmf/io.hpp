#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dgmf/char_table.hpp"
#include "dgmf/common.hpp"
#include "dgmf/cyclotomic.hpp"
#include "dgmf/drinfeld_double.hpp"
#include "dgmf/group.hpp"
#include "dgmf/surfaces.hpp"

namespace dgmf {

/// All machine output uses insertion-ordered JSON so that identical configs
/// produce byte-identical bytes. Exact values are strings; counts small
/// enough for 64 bits stay native integers (nlohmann serializes them
/// digit-exactly).
using Json = nlohmann::ordered_json;

// ---- exact and approximate numbers ----------------------------------------

inline std::string rational_string(const Rational& q) { return q.get_str(); }

/// Accepts "-?digits" or "-?digits/digits" with a nonzero denominator.
inline Rational rational_from_string(const std::string& s) {
  const auto bad = [&]() { throw_usage("bad rational literal '" + s + "'"); };
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
  if (digits == 0) bad();
  if (i < s.size()) {
    if (s[i] != '/') bad();
    ++i;
    digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    if (digits == 0 || i != s.size()) bad();
  }
  Rational r;
  if (r.set_str(s, 10) != 0) bad();
  if (r.get_den() == 0) throw_usage("zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

/// Fixed-width double rendering for the report-only complex embeddings.
inline std::string approx_string(double v) {
  if (v == 0.0) v = 0.0;  // collapse -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---- cyclotomic values ------------------------------------------------------

inline Json cyclo_to_json(const Cyclo& a, bool with_approx = false) {
  Json j;
  j["conductor"] = a.conductor();
  Json cs = Json::array();
  for (const Rational& c : a.coeffs()) cs.push_back(rational_string(c));
  j["coeffs"] = std::move(cs);
  if (with_approx) {
    const std::complex<double> z = a.to_complex();
    j["re"] = approx_string(z.real());
    j["im"] = approx_string(z.imag());
  }
  return j;
}

namespace detail {

inline const Json& json_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw_usage(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline long long json_int(const Json& j, const char* key) {
  const Json& v = json_field(j, key);
  if (!v.is_number_integer()) throw_usage(std::string("field '") + key + "' must be an integer");
  return v.get<long long>();
}

inline std::string json_string(const Json& j, const char* key) {
  const Json& v = json_field(j, key);
  if (!v.is_string()) throw_usage(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline Cyclo cyclo_from_json(const Json& j) {
  const long long e = detail::json_int(j, "conductor");
  if (e < 1 || e > 1000000) throw_usage("conductor out of range");
  const Json& cs = detail::json_field(j, "coeffs");
  if (!cs.is_array()) throw_usage("field 'coeffs' must be an array");
  const CycloContext& ctx = cyclo_context(static_cast<int>(e));
  if (static_cast<int>(cs.size()) != ctx.degree)
    throw_usage("coeffs must have length phi(conductor)");
  Cyclo acc(static_cast<int>(e));
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (!cs[k].is_string()) throw_usage("coefficients must be rational strings");
    Rational r = rational_from_string(cs[k].get<std::string>());
    if (r != 0)
      acc += Cyclo::from_rational(static_cast<int>(e), r) *
             Cyclo::root_of_unity(static_cast<int>(e), static_cast<long>(k));
  }
  return acc;
}

/// Exact polynomial rendering in z = zeta_conductor, e.g. "1/2-z^2".
inline std::string cyclo_string(const Cyclo& a) {
  std::string out;
  const auto& c = a.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    const std::string cs = rational_string(c[j]);
    std::string term;
    if (j == 0) {
      term = cs;
    } else {
      std::string var = "z";
      if (j > 1) var += "^" + std::to_string(j);
      if (cs == "1")
        term = var;
      else if (cs == "-1")
        term = "-" + var;
      else
        term = cs + "*" + var;
    }
    if (!out.empty() && term[0] != '-') out += "+";
    out += term;
  }
  return out.empty() ? "0" : out;
}

// ---- the group file format --------------------------------------------------

inline Json group_to_json(const FiniteGroup& G) {
  Json j;
  j["order"] = G.order;
  j["mul"] = G.mul;
  j["name"] = G.name;
  if (!G.element_names.empty()) j["element_names"] = G.element_names;
  return j;
}

/// {"order": N, "mul": [N*N row-major], "name"?, "element_names"?}; the table
/// must present the identity at index 0 and pass the full group axioms.
inline FiniteGroup group_from_json(const Json& j, int order_cap = Caps{}.group_order_cap) {
  const long long order = detail::json_int(j, "order");
  if (order < 1 || order > order_cap) throw_usage("group order out of range");
  const Json& mul_json = detail::json_field(j, "mul");
  if (!mul_json.is_array()) throw_usage("field 'mul' must be an array");
  std::vector<int> mul;
  mul.reserve(mul_json.size());
  for (const Json& v : mul_json) {
    if (!v.is_number_integer()) throw_usage("multiplication table entries must be integers");
    mul.push_back(v.get<int>());
  }
  std::string name;
  if (j.contains("name")) name = detail::json_string(j, "name");
  std::vector<std::string> element_names;
  if (j.contains("element_names")) {
    const Json& en = j.at("element_names");
    if (!en.is_array()) throw_usage("field 'element_names' must be an array");
    for (const Json& v : en) {
      if (!v.is_string()) throw_usage("element names must be strings");
      element_names.push_back(v.get<std::string>());
    }
  }
  return group_from_table(static_cast<int>(order), std::move(mul), std::move(name),
                          std::move(element_names), order_cap);
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_usage("cannot open '" + path.string() + "'");
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw_usage("'" + path.string() + "' is not valid JSON");
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw_usage("cannot write '" + path.string() + "'");
  out << text;
}

inline FiniteGroup load_group_file(const std::filesystem::path& path,
                                   int order_cap = Caps{}.group_order_cap) {
  return group_from_json(read_json_file(path), order_cap);
}

/// "preset:<token>" (Z<n>, S<n>, D<n>, Q8, 'x'-products) or "file:<path>"
/// (JSON Cayley table). A bare token is tried as a preset.
inline FiniteGroup resolve_group_source(const std::string& source,
                                        int order_cap = Caps{}.group_order_cap) {
  check(!source.empty(), "empty group source", Error::Kind::usage);
  if (source.rfind("preset:", 0) == 0) return preset_from_token(source.substr(7), order_cap);
  if (source.rfind("file:", 0) == 0) return load_group_file(source.substr(5), order_cap);
  return preset_from_token(source, order_cap);
}

// ---- label naming -------------------------------------------------------------

/// Canonical label name "([rep],r<row>,d<dim>)" with the class representative
/// rendered by its element name (cycle notation for permutation presets).
inline std::string label_name(const DoubleData& dd, int l) {
  const DoubleLabel& lab = dd.labels()[l];
  const int rep = dd.classes().representative[lab.class_index];
  return "([" + dd.group().element_name(rep) + "],r" + std::to_string(lab.irrep_row) + ",d" +
         std::to_string(lab.dim) + ")";
}

/// The name without the dimension suffix, "([rep],r<row>)".
inline std::string label_short_name(const DoubleData& dd, int l) {
  const DoubleLabel& lab = dd.labels()[l];
  const int rep = dd.classes().representative[lab.class_index];
  return "([" + dd.group().element_name(rep) + "],r" + std::to_string(lab.irrep_row) + ")";
}

inline Json label_names_json(const DoubleData& dd, const std::vector<int>& labels) {
  Json arr = Json::array();
  for (int l : labels) arr.push_back(label_name(dd, l));
  return arr;
}

/// Accepts "vacuum", a decimal index, or a (full or dimension-less) label
/// name; rejects anything else with the list of valid names.
inline int parse_label(const DoubleData& dd, const std::string& token) {
  if (token == "vacuum") return dd.vacuum();
  if (!token.empty() && token.find_first_not_of("0123456789") == std::string::npos) {
    if (token.size() > 6)
      throw_usage("label index out of range", R"({"label":")" + token + R"("})");
    const long idx = std::stol(token);
    if (idx >= dd.label_count())
      throw_usage("label index out of range",
                  R"({"label":)" + token + R"(,"count":)" + std::to_string(dd.label_count()) +
                      "}");
    return static_cast<int>(idx);
  }
  for (int l = 0; l < dd.label_count(); ++l)
    if (token == label_name(dd, l) || token == label_short_name(dd, l)) return l;
  Json names = Json::array();
  for (int l = 0; l < dd.label_count(); ++l) names.push_back(label_name(dd, l));
  Json payload;
  payload["token"] = token;
  payload["labels"] = std::move(names);
  throw_usage("unknown label '" + token + "'", payload.dump());
}

/// Splits a label list on ';' (names contain commas); as a convenience a
/// name-free list may use ',' instead. Empty tokens are dropped, so "" is
/// the empty list.
inline std::vector<int> parse_labels(const DoubleData& dd, const std::string& list) {
  const char sep = list.find(';') != std::string::npos
                       ? ';'
                       : (list.find('(') == std::string::npos ? ',' : ';');
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t next = list.find(sep, pos);
    if (next == std::string::npos) next = list.size();
    std::string token = list.substr(pos, next - pos);
    const auto a = token.find_first_not_of(" \t");
    if (a != std::string::npos) {
      const auto b = token.find_last_not_of(" \t");
      out.push_back(parse_label(dd, token.substr(a, b - a + 1)));
    }
    pos = next + 1;
  }
  return out;
}

// ---- character tables ---------------------------------------------------------

inline Json table_to_json(const CharacterTable& T) {
  Json j;
  j["group_order"] = T.group_order;
  j["num_classes"] = T.num_classes;
  j["conductor"] = T.conductor;
  j["degrees"] = T.degrees;
  j["class_representatives"] = T.class_reps;
  j["class_sizes"] = T.class_sizes;
  Json rows = Json::array();
  for (const auto& row : T.values) {
    Json r = Json::array();
    for (const Cyclo& v : row) r.push_back(cyclo_to_json(v));
    rows.push_back(std::move(r));
  }
  j["values"] = std::move(rows);
  return j;
}

inline CharacterTable table_from_json(const Json& j) {
  CharacterTable T;
  T.group_order = static_cast<int>(detail::json_int(j, "group_order"));
  T.num_classes = static_cast<int>(detail::json_int(j, "num_classes"));
  T.conductor = static_cast<int>(detail::json_int(j, "conductor"));
  if (T.group_order < 1 || T.num_classes < 1 || T.conductor < 1)
    throw_usage("character table header out of range");
  const auto int_list = [&](const char* key) {
    const Json& arr = detail::json_field(j, key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != T.num_classes)
      throw_usage(std::string("field '") + key + "' must list one entry per class");
    std::vector<int> out;
    for (const Json& v : arr) {
      if (!v.is_number_integer()) throw_usage(std::string("field '") + key + "' must be integers");
      out.push_back(v.get<int>());
    }
    return out;
  };
  T.degrees = int_list("degrees");
  T.class_reps = int_list("class_representatives");
  T.class_sizes = int_list("class_sizes");
  const Json& rows = detail::json_field(j, "values");
  if (!rows.is_array() || static_cast<int>(rows.size()) != T.num_classes)
    throw_usage("field 'values' must have one row per class");
  for (const Json& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != T.num_classes)
      throw_usage("character table rows must be square");
    std::vector<Cyclo> vals;
    for (const Json& v : row) {
      Cyclo c = cyclo_from_json(v);
      if (c.conductor() != T.conductor) throw_usage("character value conductor mismatch");
      vals.push_back(std::move(c));
    }
    T.values.push_back(std::move(vals));
  }
  return T;
}

// ---- fusion, modular data, histograms ------------------------------------------

/// Nonzero fusion coefficients as (lambda, mu, nu, mult) records in
/// lexicographic label order.
inline Json fusion_to_json(const DoubleData& dd) {
  Json arr = Json::array();
  for (int l = 0; l < dd.label_count(); ++l)
    for (int m = 0; m < dd.label_count(); ++m) {
      const auto& row = dd.fuse(l, m);
      for (int n = 0; n < dd.label_count(); ++n) {
        if (row[n] == 0) continue;
        Json rec;
        rec["lambda"] = label_name(dd, l);
        rec["mu"] = label_name(dd, m);
        rec["nu"] = label_name(dd, n);
        rec["mult"] = row[n];
        arr.push_back(std::move(rec));
      }
    }
  return arr;
}

inline Json cyclo_matrix_to_json(const std::vector<std::vector<Cyclo>>& rows,
                                 bool with_approx = false) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    for (const Cyclo& v : row) r.push_back(cyclo_to_json(v, with_approx));
    out.push_back(std::move(r));
  }
  return out;
}

inline Json cyclo_vector_to_json(const std::vector<Cyclo>& v, bool with_approx = false) {
  Json out = Json::array();
  for (const Cyclo& c : v) out.push_back(cyclo_to_json(c, with_approx));
  return out;
}

/// Grade histogram records sorted by monodromy vector, one record per
/// nonzero grade: {"monodromies": [h_1..h_n], "count": k}.
inline Json histogram_to_json(const FiniteGroup& G, const MarkedSurface& x,
                              const std::map<std::uint64_t, std::uint64_t>& hist) {
  const int n = x.boundary_count();
  Json arr = Json::array();
  for (const auto& [key, count] : hist) {
    std::vector<int> h(n);
    std::uint64_t k = key;
    for (int i = n - 1; i >= 0; --i) {
      h[i] = static_cast<int>(k % G.order);
      k /= static_cast<std::uint64_t>(G.order);
    }
    Json rec;
    rec["monodromies"] = h;
    rec["count"] = count;
    arr.push_back(std::move(rec));
  }
  return arr;
}

// ---- errors -----------------------------------------------------------------

inline const char* error_kind_name(Error::Kind k) {
  switch (k) {
    case Error::Kind::usage: return "usage";
    case Error::Kind::infeasible: return "infeasible";
    default: return "violation";
  }
}

inline int error_exit_code(Error::Kind k) { return static_cast<int>(k); }

inline Json error_to_json(const Error& e) {
  Json payload = Json::parse(e.payload(), nullptr, false);
  Json inner;
  inner["kind"] = error_kind_name(e.kind());
  inner["message"] = e.what();
  inner["payload"] = payload.is_discarded() ? Json(e.payload()) : payload;
  Json j;
  j["error"] = std::move(inner);
  return j;
}

// ---- CSV --------------------------------------------------------------------

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

// ---- on-disk character-table cache --------------------------------------------
//
// Cache files are self-contained: they carry the group presentation, so a
// loaded table is re-validated from scratch (group axioms, digest, both
// orthogonality relations, the central-character homomorphism property, and
// the canonical row order) before it may serve any computation. Files that
// fail any step are ignored.

namespace detail {

/// Rows must be: trivial character first, then strictly ascending by
/// (degree, lexicographic value order) — the unique canonical order.
inline void verify_canonical_row_order(const CharacterTable& T) {
  for (int i = 2; i < T.num_classes; ++i) {
    if (T.degrees[i - 1] != T.degrees[i]) {
      check(T.degrees[i - 1] < T.degrees[i], "cached table rows out of canonical order");
      continue;
    }
    int c = 0;
    for (int j = 0; j < T.num_classes && c == 0; ++j)
      c = Cyclo::compare(T.values[i - 1][j], T.values[i][j]);
    check(c < 0, "cached table rows out of canonical order");
  }
}

/// omega_i(j) = |C_j| chi_i(j) / deg_i must be an algebra homomorphism on
/// class sums: omega_i(j) omega_i(l) = sum_m a_{jl}^m omega_i(m) with the
/// integer structure constants a. Together with both orthogonality relations
/// this pins the rows to exactly the irreducible characters.
inline void verify_central_characters(const FiniteGroup& G, const ConjClassInfo& cc,
                                      const CharacterTable& T) {
  const int k = T.num_classes;
  std::vector<std::vector<Cyclo>> omega(k, std::vector<Cyclo>(k, Cyclo(T.conductor)));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      omega[i][j] =
          T.values[i][j] * fraction(static_cast<long long>(cc.classes[j].size()), T.degrees[i]);
  std::vector<long long> a(static_cast<std::size_t>(k), 0);
  for (int j = 0; j < k; ++j)
    for (int l = 0; l < k; ++l) {
      std::fill(a.begin(), a.end(), 0);
      for (int x : cc.classes[j])
        for (int y : cc.classes[l]) ++a[static_cast<std::size_t>(cc.class_of[G.at(x, y)])];
      // a_{jl}^m counts solutions landing anywhere in C_m; per fixed target
      // element that is a[m] / |C_m|.
      for (int i = 0; i < k; ++i) {
        Cyclo rhs(T.conductor);
        for (int m = 0; m < k; ++m) {
          if (a[m] == 0) continue;
          rhs += omega[i][m] *
                 fraction(a[m], static_cast<long long>(cc.classes[m].size()));
        }
        check(omega[i][j] * omega[i][l] == rhs,
              "cached table fails the central-character relations");
      }
    }
}

}  // namespace detail

inline std::filesystem::path table_cache_path(const std::filesystem::path& dir,
                                              const std::string& digest, int conductor) {
  return dir / ("table-v1-" + digest + "-c" + std::to_string(conductor) + ".json");
}

/// Validates and preloads one cache file; returns false (never throws) when
/// the file is unreadable, stale, or fails any mathematical check.
inline bool load_cached_table_file(const std::filesystem::path& file) {
  try {
    const Json j = read_json_file(file);
    if (!j.is_object() || detail::json_string(j, "format") != "dgmf-table" ||
        detail::json_int(j, "version") != 1)
      return false;
    const std::string digest = detail::json_string(j, "digest");
    FiniteGroup G = group_from_json(detail::json_field(j, "group"));
    if (cayley_digest(G) != digest) return false;
    CharacterTable T = table_from_json(detail::json_field(j, "table"));
    if (T.group_order != G.order || T.conductor % G.exponent != 0) return false;
    const ConjClassInfo cc = conjugacy_data(G);
    if (T.num_classes != static_cast<int>(cc.classes.size()) || T.num_classes > 64) return false;
    if (T.class_reps != cc.representative) return false;
    for (int t = 0; t < T.num_classes; ++t)
      if (T.class_sizes[t] != static_cast<int>(cc.classes[t].size())) return false;
    check_character_table(G, cc, T);
    detail::verify_canonical_row_order(T);
    detail::verify_central_characters(G, cc, T);
    character_table_preload(digest, std::move(G), std::move(T));
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

/// Best-effort preload of every table-v1-*.json in the directory.
inline int load_table_cache(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return 0;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string base = entry.path().filename().string();
    if (base.rfind("table-v1-", 0) == 0 && base.size() > 5 &&
        base.substr(base.size() - 5) == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  int loaded = 0;
  for (const auto& f : files)
    if (load_cached_table_file(f)) ++loaded;
  return loaded;
}

/// Writes every in-memory table that is not already on disk; best effort,
/// returns the number of files written.
inline int save_table_cache(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return 0;
  int written = 0;
  character_table_cache_visit([&](const std::string& digest, int conductor,
                                  const CachedTable& entry) {
    const std::filesystem::path path = table_cache_path(dir, digest, conductor);
    std::error_code exists_ec;
    if (std::filesystem::exists(path, exists_ec)) return;
    Json j;
    j["format"] = "dgmf-table";
    j["version"] = 1;
    j["digest"] = digest;
    j["conductor"] = conductor;
    j["group"] = group_to_json(entry.group);
    j["table"] = table_to_json(entry.table);
    try {
      const std::filesystem::path tmp = path.string() + ".tmp";
      write_text_file(tmp, j.dump(2) + "\n");
      std::filesystem::rename(tmp, path);
      ++written;
    } catch (const std::exception&) {
      // the cache is an optimization; failure to persist is not an error
    }
  });
  return written;
}

}  // namespace dgmf
