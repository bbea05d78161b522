#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dgmf/io.hpp"
#include "dgmf/mf_engine.hpp"
#include "dgmf/selftest.hpp"

namespace dgmf {

/// Everything a subcommand run depends on. One parse fills exactly one
/// subcommand, so a single shared instance is enough.
struct RunConfig {
  std::string group_source;
  std::string format = "json";
  int threads = 1;
  Caps caps;
  std::string cache_dir;  // empty -> no on-disk table cache
};

namespace detail {

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t next = list.find_first_of(";,", pos);
    if (next == std::string::npos) next = list.size();
    std::string token = list.substr(pos, next - pos);
    const auto a = token.find_first_not_of(" \t");
    if (a != std::string::npos) {
      const auto b = token.find_last_not_of(" \t");
      out.push_back(token.substr(a, b - a + 1));
    }
    pos = next + 1;
  }
  return out;
}

inline std::string format_millis(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ms);
  return buf;
}

}  // namespace detail

/// In-process CLI entry point: parses `args` (program name excluded), writes
/// the result to `out` and machine-readable JSON diagnostics to `err`.
/// Exit codes: 0 success, 1 usage, 2 infeasible (caps), 3 violated invariant.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv("DGMF_CACHE_DIR")) cfg.cache_dir = env;

  std::string out_text;
  int exit_code = 0;

  CLI::App app{"exact modular functor of the Drinfeld double of a finite group", "dgmf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group_source,
                    "preset:<token> (Z<n>, S<n>, D<n>, Q8, 'x'-products) or file:<path>")
        ->required();
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads,
                    "worker threads; results are byte-identical for any value")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    sub->add_option("--state-cap", cfg.caps.state_cap, "max states a sweep may visit")
        ->check(CLI::PositiveNumber);
    sub->add_option("--materialize-cap", cfg.caps.materialize_cap,
                    "max tuples held in memory at once")
        ->check(CLI::PositiveNumber);
    sub->add_option("--char-grid-cap", cfg.caps.char_grid_cap,
                    "max commuting-pair grid size for character sweeps")
        ->check(CLI::PositiveNumber);
    sub->add_option("--group-order-cap", cfg.caps.group_order_cap, "max group order")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cache-dir", cfg.cache_dir,
                    "character-table cache directory (default: $DGMF_CACHE_DIR)");
  };

  // Loads the disk cache, pins the worker count, and resolves the group.
  const auto prepare = [&]() {
    set_worker_count(cfg.threads);
    if (!cfg.cache_dir.empty()) load_table_cache(cfg.cache_dir);
    return resolve_group_source(cfg.group_source, cfg.caps.group_order_cap);
  };
  const auto persist_cache = [&] {
    if (!cfg.cache_dir.empty()) save_table_cache(cfg.cache_dir);
  };
  const auto finish = [&](std::string text) { out_text = std::move(text); };

  // ---- group ----------------------------------------------------------------
  struct {
    bool emit_table = false;
  } group_opts;
  {
    CLI::App* sub = app.add_subcommand("group", "conjugacy classes and centralizers");
    add_common(sub);
    sub->add_flag("--emit-table", group_opts.emit_table,
                  "print the group in the JSON Cayley-table file format");
    sub->callback([&] {
      const FiniteGroup G = prepare();
      if (group_opts.emit_table) {
        finish(detail::dump_json(group_to_json(G)));
        return;
      }
      const ConjClassInfo cc = conjugacy_data(G);
      const int k = static_cast<int>(cc.classes.size());
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "group";
        j["name"] = G.name;
        j["order"] = G.order;
        j["exponent"] = G.exponent;
        j["num_classes"] = k;
        Json classes = Json::array();
        for (int t = 0; t < k; ++t) {
          Json c;
          c["index"] = t;
          c["representative"] = cc.representative[t];
          c["representative_name"] = G.element_name(cc.representative[t]);
          c["size"] = cc.classes[t].size();
          c["element_order"] = G.element_order(cc.representative[t]);
          c["centralizer_order"] = cc.centralizer[t].size();
          classes.push_back(std::move(c));
        }
        j["classes"] = std::move(classes);
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text = csv_row({"index", "representative", "representative_name", "size",
                                    "element_order", "centralizer_order"});
        for (int t = 0; t < k; ++t)
          text += csv_row({std::to_string(t), std::to_string(cc.representative[t]),
                           G.element_name(cc.representative[t]),
                           std::to_string(cc.classes[t].size()),
                           std::to_string(G.element_order(cc.representative[t])),
                           std::to_string(cc.centralizer[t].size())});
        finish(text);
      } else {
        std::ostringstream text;
        text << "group " << G.name << ": order " << G.order << ", exponent " << G.exponent
             << ", " << k << " conjugacy classes\n";
        for (int t = 0; t < k; ++t)
          text << "  class " << t << ": rep " << G.element_name(cc.representative[t])
               << " (order " << G.element_order(cc.representative[t]) << "), size "
               << cc.classes[t].size() << ", centralizer order " << cc.centralizer[t].size()
               << "\n";
        finish(text.str());
      }
    });
  }

  // ---- double ---------------------------------------------------------------
  struct {
    bool fusion = false;
  } double_opts;
  {
    CLI::App* sub = app.add_subcommand("double", "Drinfeld-double labels and fusion");
    add_common(sub);
    sub->add_flag("--fusion", double_opts.fusion, "include the nonzero fusion coefficients");
    sub->callback([&] {
      const DoubleData dd(prepare());
      long long dimsq = 0;
      for (const auto& lab : dd.labels()) dimsq += static_cast<long long>(lab.dim) * lab.dim;
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "double";
        j["group"] = dd.group().name;
        j["order"] = dd.group().order;
        j["conductor"] = dd.conductor();
        j["num_labels"] = dd.label_count();
        Json labels = Json::array();
        for (int l = 0; l < dd.label_count(); ++l) {
          const DoubleLabel& lab = dd.labels()[l];
          Json e;
          e["index"] = l;
          e["name"] = label_name(dd, l);
          e["class_representative"] =
              dd.group().element_name(dd.classes().representative[lab.class_index]);
          e["irrep_row"] = lab.irrep_row;
          e["dim"] = lab.dim;
          e["dual"] = dd.dual(l);
          labels.push_back(std::move(e));
        }
        j["labels"] = std::move(labels);
        j["sum_dim_sq"] = dimsq;
        if (double_opts.fusion) j["fusion"] = fusion_to_json(dd);
        persist_cache();
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text;
        if (double_opts.fusion) {
          text = csv_row({"lambda", "mu", "nu", "mult"});
          for (int l = 0; l < dd.label_count(); ++l)
            for (int m = 0; m < dd.label_count(); ++m)
              for (int n = 0; n < dd.label_count(); ++n)
                if (dd.fusion(l, m, n) != 0)
                  text += csv_row({label_name(dd, l), label_name(dd, m), label_name(dd, n),
                                   std::to_string(dd.fusion(l, m, n))});
        } else {
          text = csv_row({"index", "name", "class_representative", "irrep_row", "dim", "dual"});
          for (int l = 0; l < dd.label_count(); ++l) {
            const DoubleLabel& lab = dd.labels()[l];
            text += csv_row(
                {std::to_string(l), label_name(dd, l),
                 dd.group().element_name(dd.classes().representative[lab.class_index]),
                 std::to_string(lab.irrep_row), std::to_string(lab.dim),
                 std::to_string(dd.dual(l))});
          }
        }
        persist_cache();
        finish(text);
      } else {
        std::ostringstream text;
        text << "D(" << dd.group().name << "): " << dd.label_count()
             << " labels, conductor " << dd.conductor() << "\n";
        for (int l = 0; l < dd.label_count(); ++l)
          text << "  " << l << ": " << label_name(dd, l) << ", dual " << dd.dual(l) << "\n";
        text << "sum of squared dims = " << dimsq << " = " << dd.group().order << "^2\n";
        if (double_opts.fusion) {
          for (int l = 0; l < dd.label_count(); ++l)
            for (int m = 0; m < dd.label_count(); ++m)
              for (int n = 0; n < dd.label_count(); ++n)
                if (dd.fusion(l, m, n) != 0)
                  text << "  " << label_name(dd, l) << " x " << label_name(dd, m) << " -> "
                       << label_name(dd, n) << "  (" << dd.fusion(l, m, n) << ")\n";
        }
        persist_cache();
        finish(text.str());
      }
    });
  }

  // ---- bundles ---------------------------------------------------------------
  struct {
    int genus = 0;
    int points = 1;
    bool count_only = false;
  } bundle_opts;
  {
    CLI::App* sub = app.add_subcommand("bundles", "marked G-bundle counts and grades");
    add_common(sub);
    sub->add_option("--genus", bundle_opts.genus, "surface genus")->required();
    sub->add_option("--points", bundle_opts.points, "number of marked boundary circles")
        ->required();
    sub->add_flag("--count-only", bundle_opts.count_only, "skip the grade histogram");
    sub->callback([&] {
      const FiniteGroup G = prepare();
      const MarkedSurface x = make_surface(bundle_opts.genus, bundle_opts.points);
      const std::uint64_t count = bundle_count(G, x, cfg.caps);
      std::map<std::uint64_t, std::uint64_t> hist;
      if (!bundle_opts.count_only) hist = monodromy_histogram(G, x, cfg.caps);
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "bundles";
        j["group"] = G.name;
        j["order"] = G.order;
        j["genus"] = x.genus;
        j["points"] = x.boundary_count();
        j["count"] = count;
        if (!bundle_opts.count_only) j["grade_histogram"] = histogram_to_json(G, x, hist);
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text;
        if (bundle_opts.count_only) {
          text = csv_row({"count"}) + csv_row({std::to_string(count)});
        } else {
          std::vector<std::string> header;
          for (int i = 1; i <= x.boundary_count(); ++i) header.push_back("m" + std::to_string(i));
          header.push_back("count");
          text = csv_row(header);
          for (const auto& [key, c] : hist) {
            std::vector<std::string> row(static_cast<std::size_t>(x.boundary_count()) + 1);
            std::uint64_t k = key;
            for (int i = x.boundary_count() - 1; i >= 0; --i) {
              row[i] = std::to_string(k % G.order);
              k /= static_cast<std::uint64_t>(G.order);
            }
            row.back() = std::to_string(c);
            text += csv_row(row);
          }
        }
        finish(text);
      } else {
        std::ostringstream text;
        text << "genus " << x.genus << ", " << x.boundary_count() << " marked points over "
             << G.name << ": " << count << " bundle classes\n";
        if (!bundle_opts.count_only)
          text << "  (" << hist.size() << " nonzero monodromy grades)\n";
        finish(text.str());
      }
    });
  }

  // ---- dims ------------------------------------------------------------------
  struct {
    int genus = 0;
    int points = 1;
    std::string labels;
    std::string method = "all";
  } dims_opts;
  {
    CLI::App* sub = app.add_subcommand("dims", "modular-functor dimensions dim W(X; labels)");
    add_common(sub);
    sub->add_option("--genus", dims_opts.genus, "surface genus")->required();
    sub->add_option("--points", dims_opts.points, "number of marked boundary circles")
        ->required();
    sub->add_option("--labels", dims_opts.labels,
                    "';'-separated labels, one per point (names, indices, or 'vacuum')")
        ->required();
    sub->add_option("--method", dims_opts.method, "computation route")
        ->check(CLI::IsMember({"enumeration", "characters", "verlinde", "all"}))
        ->capture_default_str();
    sub->callback([&] {
      const DoubleData dd(prepare());
      const MarkedSurface x = make_surface(dims_opts.genus, dims_opts.points);
      const std::vector<int> labels = parse_labels(dd, dims_opts.labels);
      const DimMethod method = dims_opts.method == "enumeration" ? DimMethod::enumeration
                               : dims_opts.method == "characters" ? DimMethod::characters
                               : dims_opts.method == "verlinde"   ? DimMethod::verlinde
                                                                  : DimMethod::all;
      const DimWResult r = dim_w(dd, x, labels, method, cfg.caps);
      persist_cache();
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "dims";
        j["group"] = dd.group().name;
        j["order"] = dd.group().order;
        j["genus"] = x.genus;
        j["points"] = x.boundary_count();
        j["labels"] = label_names_json(dd, labels);
        j["method"] = dims_opts.method;
        j["value"] = r.value;
        Json routes;
        for (const auto& [route, v] : r.by_route) routes[route] = v;
        j["by_route"] = std::move(routes);
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text = csv_row({"route", "value"});
        for (const auto& [route, v] : r.by_route) text += csv_row({route, std::to_string(v)});
        text += csv_row({"value", std::to_string(r.value)});
        finish(text);
      } else {
        std::ostringstream text;
        text << "dim W(genus " << x.genus << ", " << x.boundary_count() << " points; ";
        for (std::size_t i = 0; i < labels.size(); ++i)
          text << (i ? ", " : "") << label_name(dd, labels[i]);
        text << ") = " << r.value << "\n";
        for (const auto& [route, v] : r.by_route)
          text << "  " << route << ": " << v << "\n";
        finish(text.str());
      }
    });
  }

  // ---- glue-check -------------------------------------------------------------
  struct {
    int genus = 0;
    int points = 1;
    std::string labels;
    std::string cut = "nonseparating";
    int cut_genus = 0;
    std::string cut_boundaries;
    bool dims_only = false;
  } glue_opts;
  {
    CLI::App* sub = app.add_subcommand(
        "glue-check", "verify the cut-and-glue dimension identity and tuple bijection");
    add_common(sub);
    sub->add_option("--genus", glue_opts.genus, "surface genus")->required();
    sub->add_option("--points", glue_opts.points, "number of marked boundary circles")
        ->required();
    sub->add_option("--labels", glue_opts.labels, "';'-separated labels, one per point")
        ->required();
    sub->add_option("--cut", glue_opts.cut, "cut kind")
        ->check(CLI::IsMember({"nonseparating", "separating"}))
        ->capture_default_str();
    sub->add_option("--cut-genus", glue_opts.cut_genus,
                    "genus of the split-off piece (separating cuts)");
    sub->add_option("--cut-boundaries", glue_opts.cut_boundaries,
                    "boundary names carried by the split-off piece (separating cuts)");
    sub->add_flag("--dims-only", glue_opts.dims_only, "skip the tuple-level bijection check");
    sub->callback([&] {
      const DoubleData dd(prepare());
      const MarkedSurface x = make_surface(glue_opts.genus, glue_opts.points);
      const std::vector<int> labels = parse_labels(dd, glue_opts.labels);
      const CutSpec spec =
          glue_opts.cut == "nonseparating"
              ? CutSpec::nonseparating()
              : CutSpec::separating(glue_opts.cut_genus,
                                    detail::split_names(glue_opts.cut_boundaries));
      const CutResult pieces = cut_surface(x, spec);
      const GluingDimReport rep = verify_gluing(dd, x, spec, labels, cfg.caps);
      bool bijection_ran = false;
      std::string bijection_note = "skipped (--dims-only)";
      GluingReport bij;
      if (!glue_opts.dims_only) {
        try {
          bij = gluing_bijection_check(dd.group(), x, spec, cfg.caps);
          bijection_ran = true;
        } catch (const Error& e) {
          if (e.kind() != Error::Kind::infeasible) throw;
          bijection_note = std::string("skipped: ") + e.what();
        }
      }
      persist_cache();
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "glue-check";
        j["group"] = dd.group().name;
        j["order"] = dd.group().order;
        j["genus"] = x.genus;
        j["points"] = x.boundary_count();
        j["labels"] = label_names_json(dd, labels);
        Json cut;
        cut["kind"] = glue_opts.cut;
        if (glue_opts.cut == "separating") {
          cut["genus_piece"] = glue_opts.cut_genus;
          cut["piece_boundaries"] = detail::split_names(glue_opts.cut_boundaries);
        }
        j["cut"] = std::move(cut);
        Json pj = Json::array();
        for (const auto& piece : pieces.pieces) {
          Json p;
          p["genus"] = piece.genus;
          p["boundaries"] = piece.boundary_names;
          pj.push_back(std::move(p));
        }
        j["pieces"] = std::move(pj);
        j["whole"] = rep.whole;
        Json contribs = Json::array();
        for (const auto& [mu, dim] : rep.contributions) {
          Json c;
          c["label"] = label_name(dd, mu);
          c["dim"] = dim;
          contribs.push_back(std::move(c));
        }
        j["contributions"] = std::move(contribs);
        j["glued_total"] = rep.glued_total;
        if (bijection_ran) {
          Json b;
          b["bundles"] = bij.bundles_on_surface;
          b["matched_tuples"] = bij.matched_tuples;
          b["orbits"] = bij.orbit_count;
          b["invariants_dim"] = bij.invariants_dim;
          b["invariants_dim_swapped"] = bij.invariants_dim_swapped;
          j["bijection"] = std::move(b);
        } else {
          Json b;
          b["skipped"] = bijection_note;
          j["bijection"] = std::move(b);
        }
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text = csv_row({"label", "dim"});
        for (const auto& [mu, dim] : rep.contributions)
          text += csv_row({label_name(dd, mu), std::to_string(dim)});
        text += csv_row({"glued_total", std::to_string(rep.glued_total)});
        text += csv_row({"whole", std::to_string(rep.whole)});
        finish(text);
      } else {
        std::ostringstream text;
        text << "dim W(whole) = " << rep.whole << ", glued sum = " << rep.glued_total << "\n";
        for (const auto& [mu, dim] : rep.contributions)
          if (dim != 0) text << "  " << label_name(dd, mu) << ": " << dim << "\n";
        if (bijection_ran)
          text << "bijection: " << bij.matched_tuples << " matched tuples, "
               << bij.orbit_count << " orbits = " << bij.bundles_on_surface
               << " bundle classes\n";
        else
          text << "bijection: " << bijection_note << "\n";
        finish(text.str());
      }
    });
  }

  // ---- modular ---------------------------------------------------------------
  {
    CLI::App* sub = app.add_subcommand("modular", "modular data S and T with axiom checks");
    add_common(sub);
    sub->callback([&] {
      const DoubleData dd(prepare());
      const ModularData& md = modular_data(dd);
      persist_cache();
      const int L = dd.label_count();
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "modular";
        j["group"] = dd.group().name;
        j["order"] = dd.group().order;
        j["conductor"] = md.conductor;
        Json names = Json::array();
        for (int l = 0; l < L; ++l) names.push_back(label_name(dd, l));
        j["labels"] = std::move(names);
        j["S"] = cyclo_matrix_to_json(md.S, true);
        j["T"] = cyclo_vector_to_json(md.T, true);
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text = csv_row({"block", "row", "col", "exact", "re", "im"});
        for (int i = 0; i < L; ++i)
          for (int l = 0; l < L; ++l) {
            const std::complex<double> z = md.S[i][l].to_complex();
            text += csv_row({"S", std::to_string(i), std::to_string(l),
                             cyclo_string(md.S[i][l]), approx_string(z.real()),
                             approx_string(z.imag())});
          }
        for (int i = 0; i < L; ++i) {
          const std::complex<double> z = md.T[i].to_complex();
          text += csv_row({"T", std::to_string(i), "", cyclo_string(md.T[i]),
                           approx_string(z.real()), approx_string(z.imag())});
        }
        finish(text);
      } else {
        std::ostringstream text;
        text << "modular data of D(" << dd.group().name << "), conductor " << md.conductor
             << " (all axioms verified)\n";
        for (int i = 0; i < L; ++i) {
          text << "  S[" << i << "]:";
          for (int l = 0; l < L; ++l) text << " " << cyclo_string(md.S[i][l]);
          text << "\n";
        }
        text << "  T:";
        for (int i = 0; i < L; ++i) text << " " << cyclo_string(md.T[i]);
        text << "\n";
        finish(text.str());
      }
    });
  }

  // ---- verlinde --------------------------------------------------------------
  struct {
    int genus = 0;
    std::string labels;
  } verlinde_opts;
  {
    CLI::App* sub = app.add_subcommand(
        "verlinde", "dimension by the Verlinde formula (closed surfaces allowed)");
    add_common(sub);
    sub->add_option("--genus", verlinde_opts.genus, "surface genus")->required();
    sub->add_option("--labels", verlinde_opts.labels,
                    "';'-separated boundary labels; \"\" for a closed surface");
    sub->callback([&] {
      const DoubleData dd(prepare());
      const std::vector<int> labels = parse_labels(dd, verlinde_opts.labels);
      const std::uint64_t value = verlinde_dim(dd, verlinde_opts.genus, labels);
      persist_cache();
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "verlinde";
        j["group"] = dd.group().name;
        j["order"] = dd.group().order;
        j["genus"] = verlinde_opts.genus;
        j["labels"] = label_names_json(dd, labels);
        j["value"] = value;
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        finish(csv_row({"value"}) + csv_row({std::to_string(value)}));
      } else {
        std::ostringstream text;
        text << "Verlinde dimension (genus " << verlinde_opts.genus << ", " << labels.size()
             << " labels) = " << value << "\n";
        finish(text.str());
      }
    });
  }

  // ---- selftest --------------------------------------------------------------
  {
    CLI::App* sub = app.add_subcommand("selftest", "run the full invariant suite");
    add_common(sub);
    sub->callback([&] {
      const FiniteGroup G = prepare();
      const SelftestReport rep = run_selftest(G, cfg.caps);
      persist_cache();
      if (cfg.format == "json") {
        Json j;
        j["version"] = kVersion;
        j["command"] = "selftest";
        j["group"] = G.name;
        j["order"] = G.order;
        Json checks = Json::array();
        for (const auto& c : rep.checks) {
          Json e;
          e["name"] = c.name;
          e["status"] = c.passed ? "pass" : "fail";
          if (c.passed && !c.message.empty()) e["note"] = c.message;
          if (!c.passed) {
            e["message"] = c.message;
            Json payload = Json::parse(c.payload, nullptr, false);
            e["payload"] = payload.is_discarded() ? Json(c.payload) : payload;
          }
          checks.push_back(std::move(e));
        }
        j["checks"] = std::move(checks);
        j["num_checks"] = rep.checks.size();
        j["failed"] = rep.failed_count();
        j["passed"] = rep.passed();
        finish(detail::dump_json(j));
      } else if (cfg.format == "csv") {
        std::string text = csv_row({"name", "status", "message"});
        for (const auto& c : rep.checks)
          text += csv_row({c.name, c.passed ? "pass" : "fail", c.message});
        finish(text);
      } else {
        std::ostringstream text;
        for (const auto& c : rep.checks) {
          text << (c.passed ? "PASS" : "FAIL") << " " << c.name << " ("
               << detail::format_millis(c.millis) << " ms)";
          if (!c.message.empty()) text << " — " << c.message;
          text << "\n";
        }
        text << (rep.passed() ? "all checks passed" : "FAILURES PRESENT") << " ("
             << rep.checks.size() << " checks)\n";
        finish(text.str());
      }
      if (!rep.passed()) {
        exit_code = 3;
        Json failed = Json::array();
        for (const auto& c : rep.checks)
          if (!c.passed) failed.push_back(c.name);
        Json payload;
        payload["failed"] = std::move(failed);
        Error e(Error::Kind::violation, "selftest failed", payload.dump());
        err << detail::dump_json(error_to_json(e));
      }
    });
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);  // --help / --version
  } catch (const CLI::ParseError& e) {
    const Error wrapped(Error::Kind::usage, e.what());
    err << detail::dump_json(error_to_json(wrapped));
    return 1;
  } catch (const Error& e) {
    err << detail::dump_json(error_to_json(e));
    return error_exit_code(e.kind());
  } catch (const std::exception& e) {
    const Error wrapped(Error::Kind::violation, e.what());
    err << detail::dump_json(error_to_json(wrapped));
    return 3;
  }

  out << out_text;
  return exit_code;
}

}  // namespace dgmf
