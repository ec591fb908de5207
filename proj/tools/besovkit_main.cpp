// besovkit: corpus generation, norm computation, decomposition round trips,
// equivalence sweeps, atom validation, and the inequality battery.
//
// Exit codes: 0 ok, 2 config/validation error, 3 numerical failure,
// 4 truncation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "besovkit/corpus.hpp"
#include "besovkit/decomposition.hpp"
#include "besovkit/io.hpp"
#include "besovkit/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bk;

namespace {

int log_level() {
  const char* env = std::getenv("BESOVKIT_LOG");
  if (!env) return 1;
  std::string v = env;
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[besovkit] " << msg << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_pq(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw error(errc::invalid_argument, "bad p/q value: " + j.get<std::string>());
  }
  return j.get<double>();
}

struct RunConfig {
  Grid grid{1, 4096, 40.0};
  ValueSpace space = ValueSpace::euclidean(1);
  SpaceParams prm = SpaceParams::make(1, 1.0, 2.0, 2.0, Family::B);
  int J_max = -1;
  int N_mom = 2;
  int peetre_S = 2;
  double d_support = 1.3;
  DecomposeOptions dec;
  int gamma_max = 4;
  std::string dec_mode = "quark";
  int M_general = 2;
  int corpus_count = 20;
  std::vector<double> sweep_s{0.5, 1.0, 2.0};
  std::vector<double> sweep_p{1.0, 2.0};
  std::vector<double> sweep_q{1.0, 2.0, kInf};
  std::vector<NormTag> tags{NormTag::besov, NormTag::triebel, NormTag::local_means,
                            NormTag::peetre, NormTag::harmonic};
  double band = 50.0;
};

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream is(path);
  if (!is) throw error(errc::invalid_argument, "cannot open config " + path);
  json j = json::parse(is, nullptr, true, true);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid = Grid::make(g.value("n", 1), g.value("N", std::size_t(4096)), g.value("T", 40.0));
  }
  if (j.contains("value_space")) {
    const auto& v = j["value_space"];
    double r = v.contains("r") ? parse_pq(v["r"]) : 2.0;
    cfg.space = ValueSpace::make(v.value("dim", 1), r);
  }
  if (j.contains("space")) {
    const auto& s = j["space"];
    Family fam = s.value("family", std::string("B")) == "F" ? Family::F : Family::B;
    cfg.prm = SpaceParams::make(cfg.grid.n, s.value("s", 1.0),
                                s.contains("p") ? parse_pq(s["p"]) : 2.0,
                                s.contains("q") ? parse_pq(s["q"]) : 2.0, fam);
    if (s.contains("K")) cfg.prm.K = s["K"].get<int>();
    if (s.contains("L")) cfg.prm.L = s["L"].get<int>();
    if (s.contains("a")) cfg.prm.a = s["a"].get<double>();
    if (s.contains("mu")) cfg.prm.mu = s["mu"].get<int>();
    if (s.contains("k_poisson")) cfg.prm.k_poisson = s["k_poisson"].get<int>();
    cfg.prm.validate();
  }
  if (j.contains("kernels")) {
    const auto& k = j["kernels"];
    cfg.J_max = k.value("J_max", -1);
    cfg.N_mom = k.value("N_mom", 2);
    cfg.peetre_S = k.value("peetre_S", 2);
    cfg.d_support = k.value("d_support", 1.3);
  }
  if (j.contains("decomposition")) {
    const auto& d = j["decomposition"];
    cfg.dec.nu_max = d.value("nu_max", 6);
    cfg.dec.gauss_order = d.value("gauss_order", 6);
    cfg.dec.check_truncation = d.value("check_truncation", true);
    cfg.dec.truncation_threshold = d.value("threshold", 5e-2);
    cfg.gamma_max = d.value("gamma_max", 4);
    cfg.dec_mode = d.value("mode", std::string("quark"));
    cfg.M_general = d.value("M", 2);
    if (d.contains("mu")) cfg.prm.mu = d["mu"].get<int>();
  }
  if (j.contains("corpus")) cfg.corpus_count = j["corpus"].value("count", 20);
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    auto load_list = [&](const char* key, std::vector<double>& dst) {
      if (!s.contains(key)) return;
      dst.clear();
      for (const auto& e : s[key]) dst.push_back(parse_pq(e));
    };
    load_list("s", cfg.sweep_s);
    load_list("p", cfg.sweep_p);
    load_list("q", cfg.sweep_q);
    if (s.contains("tags")) {
      cfg.tags.clear();
      for (const auto& t : s["tags"]) {
        auto tag = norm_tag_from_name(t.get<std::string>());
        if (!tag) throw error(errc::invalid_argument, "unknown norm tag " + t.get<std::string>());
        cfg.tags.push_back(*tag);
      }
    }
    cfg.band = s.value("band", 50.0);
  }
  return cfg;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, std::uint64_t seed,
                    const std::string& command) {
  json m{{"command", command},
         {"seed", seed},
         {"grid", {{"n", cfg.grid.n}, {"N", cfg.grid.N}, {"T", cfg.grid.T}}},
         {"value_space", {{"dim", cfg.space.dim}, {"r", cfg.space.r == kInf ? json("inf") : json(cfg.space.r)}}},
         {"params", json::parse(space_params_to_json(cfg.prm))},
         {"kernels",
          {{"J_max", cfg.J_max < 0 ? max_dyadic_level(cfg.grid) : cfg.J_max},
           {"N_mom", cfg.N_mom},
           {"peetre_S", cfg.peetre_S},
           {"d_support", cfg.d_support},
           {"bump", "exp(-1/(1-r^2)) glue"},
           {"gauss_order", cfg.dec.gauss_order}}},
         {"decomposition",
          {{"mu", cfg.prm.mu},
           {"nu_max", cfg.dec.nu_max},
           {"gamma_max", cfg.gamma_max},
           {"mode", cfg.dec_mode}}}};
  std::ofstream os(dir / "run_manifest.json");
  os << m.dump(2) << "\n";
}

struct Emitter {
  std::string format; // csv | json
  fs::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void emit() const {
    std::ofstream os(path);
    if (format == "json") {
      json out = json::array();
      for (const auto& r : rows) {
        json row;
        for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = r[c];
        out.push_back(row);
      }
      os << out.dump(2) << "\n";
      return;
    }
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
      os << "\n";
    }
  }
};

std::vector<NamedFunction> load_inputs(const RunConfig& cfg, const std::string& input,
                                       const std::string& corpus_dir, std::uint64_t seed) {
  std::vector<NamedFunction> fns;
  if (!input.empty()) {
    fns.push_back({fs::path(input).stem().string(), read_grid_function(input)});
  } else if (!corpus_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(corpus_dir))
      if (e.path().extension() == ".bkgf") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) fns.push_back({p.stem().string(), read_grid_function(p.string())});
    if (fns.empty()) throw error(errc::invalid_argument, "no .bkgf files in " + corpus_dir);
  } else {
    fns = make_corpus(cfg.grid, cfg.space, seed, cfg.corpus_count);
  }
  return fns;
}

SpaceParams sweep_point(const RunConfig& cfg, double s, double p, double q, Family fam) {
  SpaceParams prm = SpaceParams::make(cfg.grid.n, s, p, q, fam);
  prm.mu = cfg.prm.mu;
  return prm;
}

int cmd_gen_corpus(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed) {
  fs::create_directories(out_dir);
  auto fns = make_corpus(cfg.grid, cfg.space, seed, cfg.corpus_count);
  int idx = 0;
  for (const auto& nf : fns) {
    char name[64];
    std::snprintf(name, sizeof name, "corpus_%02d_%s.bkgf", idx++, nf.name.c_str());
    write_grid_function((fs::path(out_dir) / name).string(), nf.fn, nf.name);
  }
  write_manifest(out_dir, cfg, seed, "gen-corpus");
  log_info("wrote " + std::to_string(fns.size()) + " corpus entries to " + out_dir);
  return 0;
}

int cmd_norm(const RunConfig& cfg, const std::string& input, const std::string& corpus_dir,
             const std::string& out_dir, std::uint64_t seed, int jobs,
             const std::string& format) {
  fs::create_directories(out_dir);
  auto fns = load_inputs(cfg, input, corpus_dir, seed);
  NormToolbox tb = NormToolbox::make(cfg.grid, cfg.J_max, cfg.N_mom, cfg.peetre_S);

  std::vector<std::vector<std::pair<NormTag, double>>> results(fns.size());
  parallel_for(fns.size(), jobs, [&](std::size_t i) {
    bool zero = true;
    for (int c = 0; c < fns[i].fn.dim() && zero; ++c)
      for (const auto& z : fns[i].fn.plane(c))
        if (z != cplx(0, 0)) {
          zero = false;
          break;
        }
    if (zero) {
      for (NormTag t : cfg.tags) results[i].emplace_back(t, 0.0);
      return;
    }
    NormReport rep = compare_norms(fns[i].fn, cfg.prm, cfg.tags, tb);
    results[i] = rep.values;
  });

  Emitter em{format, fs::path(out_dir) / ("norms." + format), {"function_id", "norm_tag", "value"}, {}};
  Emitter ratios{format, fs::path(out_dir) / ("norm_ratios." + format),
                 {"function_id", "tag_a", "tag_b", "ratio"}, {}};
  for (std::size_t i = 0; i < fns.size(); ++i) {
    for (const auto& [tag, value] : results[i])
      em.rows.push_back({fns[i].name, norm_tag_name(tag), fmt(value)});
    for (const auto& [ta, va] : results[i])
      for (const auto& [tb, vb] : results[i]) {
        if (ta == tb) continue;
        ratios.rows.push_back(
            {fns[i].name, norm_tag_name(ta), norm_tag_name(tb), fmt(vb == 0.0 ? 0.0 : va / vb)});
      }
  }
  em.emit();
  ratios.emit();
  write_manifest(out_dir, cfg, seed, "norm");
  log_info("wrote " + em.path.string());
  return 0;
}

int cmd_decompose(const RunConfig& cfg, const std::string& input, const std::string& out_dir,
                  std::uint64_t seed, const std::string& format) {
  fs::create_directories(out_dir);
  auto fns = load_inputs(cfg, input, "", seed);
  const GridFunction& f = fns.front().fn;
  PartitionWindow window = build_partition_window(cfg.grid, cfg.d_support);

  fs::path rep_path = fs::path(out_dir) / (fns.front().name + ".bkrp");
  double err = 0.0;
  if (cfg.dec_mode == "harmonic") {
    AtomicRepresentation rep = harmonic_decompose(f, cfg.prm, window, cfg.dec);
    write_representation(rep_path.string(), rep);
    GridFunction recon = reconstruct_atomic(rep);
    recon -= f;
    err = lp_norm(recon, 2.0) / std::max(lp_norm(f, 2.0), 1e-300);
  } else if (cfg.dec_mode == "quark") {
    QuarkRepresentation rep = quark_decompose(f, cfg.prm, window, cfg.gamma_max, cfg.dec);
    write_representation(rep_path.string(), rep);
    GridFunction recon = reconstruct_quark(rep, cfg.grid, window);
    recon -= f;
    err = lp_norm(recon, 2.0) / std::max(lp_norm(f, 2.0), 1e-300);
  } else if (cfg.dec_mode == "general") {
    QuarkRepresentation rep =
        quark_decompose_general(f, cfg.prm, cfg.M_general, window, cfg.gamma_max, cfg.dec);
    write_representation(rep_path.string(), rep);
    GridFunction recon = reconstruct_quark(rep, cfg.grid, window);
    recon -= f;
    err = lp_norm(recon, 2.0) / std::max(lp_norm(f, 2.0), 1e-300);
  } else {
    throw error(errc::invalid_argument, "unknown decomposition mode " + cfg.dec_mode);
  }

  Emitter em{format, fs::path(out_dir) / ("decompose_report." + format),
             {"function_id", "mode", "rel_l2_error", "rep_file"},
             {{fns.front().name, cfg.dec_mode, fmt(err), rep_path.filename().string()}}};
  em.emit();
  write_manifest(out_dir, cfg, seed, "decompose");
  log_info("representation written to " + rep_path.string() + ", rel error " + fmt(err));
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const std::string& rep_file, const std::string& original,
                    const std::string& out_dir, const std::string& format) {
  fs::create_directories(out_dir);
  GridFunction f = read_grid_function(original);
  PartitionWindow window = build_partition_window(f.grid(), cfg.d_support);
  GridFunction recon = GridFunction::zero(f.grid(), f.space());
  std::string mode;
  if (peek_representation_kind(rep_file) == RepKind::quark) {
    QuarkRepresentation rep = read_quark_representation(rep_file);
    recon = reconstruct_quark(rep, f.grid(), window);
    mode = "quark";
  } else {
    AtomicRepresentation rep = read_atomic_representation(rep_file);
    recon = reconstruct_atomic(rep);
    mode = "harmonic";
  }
  GridFunction diff = recon;
  if (diff.dim() == f.dim()) diff -= f;
  double err = lp_norm(diff, 2.0) / std::max(lp_norm(f, 2.0), 1e-300);
  write_grid_function((fs::path(out_dir) / "reconstruction.bkgf").string(), recon);
  Emitter em{format, fs::path(out_dir) / ("reconstruct_report." + format),
             {"rep_file", "mode", "rel_l2_error"},
             {{fs::path(rep_file).filename().string(), mode, fmt(err)}}};
  em.emit();
  log_info("reconstruction error " + fmt(err));
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& corpus_dir, const std::string& out_dir,
              std::uint64_t seed, int jobs, const std::string& format) {
  if (cfg.sweep_s.empty() || cfg.sweep_p.empty() || cfg.sweep_q.empty())
    throw error(errc::invalid_argument, "sweep: empty parameter grid");
  fs::create_directories(out_dir);
  auto fns = load_inputs(cfg, "", corpus_dir, seed);
  NormToolbox tb = NormToolbox::make(cfg.grid, cfg.J_max, cfg.N_mom, cfg.peetre_S);

  std::vector<std::unique_ptr<FunctionAnalysis>> analyses(fns.size());
  parallel_for(fns.size(), jobs, [&](std::size_t i) {
    analyses[i] = std::make_unique<FunctionAnalysis>(tb, fns[i].fn);
  });

  Emitter values{format, fs::path(out_dir) / ("sweep_values." + format),
                 {"s", "p", "q", "function_id", "norm_tag", "value"}, {}};
  Emitter ratios{format, fs::path(out_dir) / ("sweep_ratios." + format),
                 {"s", "p", "q", "function_id", "tag_a", "tag_b", "ratio"}, {}};
  Emitter bands{format, fs::path(out_dir) / ("sweep_bands." + format),
                {"s", "p", "q", "tag_a", "tag_b", "band"}, {}};
  Emitter summary{format, fs::path(out_dir) / ("sweep_summary." + format),
                  {"s", "p", "q", "max_band", "band_limit", "ok"}, {}};

  for (double s : cfg.sweep_s)
    for (double p : cfg.sweep_p)
      for (double q : cfg.sweep_q) {
        double thresh = double(cfg.grid.n) / double(cfg.grid.n + 1);
        if (!(p > thresh)) continue;
        SpaceParams prm = sweep_point(cfg, s, p, q, Family::B);
        std::vector<NormTag> tags = cfg.tags;
        if (p == kInf)
          tags.erase(std::remove(tags.begin(), tags.end(), NormTag::triebel), tags.end());
        // values[tag][fn]
        std::vector<std::vector<double>> vals(tags.size(), std::vector<double>(fns.size()));
        parallel_for(fns.size(), jobs, [&](std::size_t i) {
          for (std::size_t t = 0; t < tags.size(); ++t)
            vals[t][i] = analyses[i]->norm(prm, tags[t]);
        });
        for (std::size_t i = 0; i < fns.size(); ++i)
          for (std::size_t t = 0; t < tags.size(); ++t)
            values.rows.push_back({fmt(s), fmt(p), fmt(q), fns[i].name,
                                   norm_tag_name(tags[t]), fmt(vals[t][i])});
        double max_band = 0.0;
        for (std::size_t a = 0; a < tags.size(); ++a)
          for (std::size_t b = a + 1; b < tags.size(); ++b) {
            double lo = kInf, hi = 0.0;
            for (std::size_t i = 0; i < fns.size(); ++i) {
              double r = vals[a][i] / vals[b][i];
              ratios.rows.push_back({fmt(s), fmt(p), fmt(q), fns[i].name,
                                     norm_tag_name(tags[a]), norm_tag_name(tags[b]), fmt(r)});
              lo = std::min(lo, r);
              hi = std::max(hi, r);
            }
            double band = hi / lo;
            max_band = std::max(max_band, band);
            bands.rows.push_back({fmt(s), fmt(p), fmt(q), norm_tag_name(tags[a]),
                                  norm_tag_name(tags[b]), fmt(band)});
          }
        summary.rows.push_back({fmt(s), fmt(p), fmt(q), fmt(max_band), fmt(cfg.band),
                                max_band <= cfg.band ? "yes" : "no"});
      }
  values.emit();
  ratios.emit();
  bands.emit();
  summary.emit();
  write_manifest(out_dir, cfg, seed, "sweep");
  log_info("sweep tables written to " + out_dir);
  return 0;
}

int cmd_validate_atoms(const RunConfig& cfg, const std::string& rep_file,
                       const std::string& out_dir, std::uint64_t seed,
                       const std::string& format) {
  fs::create_directories(out_dir);
  Emitter em{format, fs::path(out_dir) / ("atom_validation." + format),
             {"atom", "support_leak", "max_deriv_ratio", "max_moment_residual", "pass"}, {}};
  if (!rep_file.empty()) {
    AtomicRepresentation rep = read_atomic_representation(rep_file);
    std::size_t idx = 0;
    for (const auto& a : rep.atoms) {
      auto v = validate_atom(a, rep.prm);
      em.rows.push_back({"atom_" + std::to_string(idx++), fmt(v.support_leak),
                         fmt(v.max_deriv_ratio), fmt(v.max_moment_residual),
                         v.support_ok && v.moments_ok ? "yes" : "no"});
    }
  } else {
    // validate quark profiles placed as level-0 atoms around the origin
    PartitionWindow window = build_partition_window(cfg.grid, cfg.d_support);
    int T_int = int(std::round(cfg.grid.T));
    std::uint64_t m_center = std::uint64_t(T_int / 2); // cube with center at x = 0
    for (int gdeg = 0; gdeg <= cfg.gamma_max; ++gdeg) {
      QuarkProfile qp = quark_profile(window, {gdeg, 0}, cfg.prm.L >= 1 ? cfg.prm.L : -1);
      Atom a = make_atom(qp.profile, 0, {m_center, cfg.grid.n == 2 ? m_center : 0},
                         cfg.d_support, Atom::Kind::sp_KL, cfg.prm.K, qp.L);
      auto v = validate_atom(a, cfg.prm);
      em.rows.push_back({"quark_g" + std::to_string(gdeg), fmt(v.support_leak),
                         fmt(v.max_deriv_ratio), fmt(v.max_moment_residual),
                         v.support_ok && v.moments_ok ? "yes" : "no"});
    }
  }
  em.emit();
  write_manifest(out_dir, cfg, seed, "validate-atoms");
  return 0;
}

int cmd_test_inequalities(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
                          int jobs, const std::string& format) {
  fs::create_directories(out_dir);
  NormToolbox tb = NormToolbox::make(cfg.grid, cfg.J_max, cfg.N_mom, cfg.peetre_S);
  Emitter em{format, fs::path(out_dir) / ("inequalities." + format),
             {"inequality", "case", "constant"}, {}};

  // Nikolskii: ||f||_{p2} <= c r^{n(1/p1-1/p2)} ||f||_{p1} on band-limited fields
  for (double r : {1.0, 2.0, 4.0, 8.0}) {
    if (r >= 0.8 * std::ldexp(1.0, max_dyadic_level(cfg.grid))) continue;
    auto family = make_band_limited_family(cfg.grid, cfg.space, r, seed + std::uint64_t(r), 5);
    for (auto& [p1, p2] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {2.0, kInf}}) {
      for (const auto& nf : family) {
        double lhs = lp_norm(nf.fn, p2);
        double rhs = std::pow(r, double(cfg.grid.n) * (1.0 / p1 - (p2 == kInf ? 0.0 : 1.0 / p2))) *
                     lp_norm(nf.fn, p1);
        em.rows.push_back({"nikolskii",
                           "r=" + fmt(r) + ",p1=" + fmt(p1) + ",p2=" + (p2 == kInf ? "inf" : fmt(p2)) +
                               "," + nf.name,
                           fmt(lhs / rhs)});
      }
    }
  }

  // convolution: ||g*f||_p <= (2pi)^{-n/2} ||g||_1 ||f||_p
  {
    auto fam = make_corpus(cfg.grid, cfg.space, seed ^ 0x1234, 6);
    auto ker = make_corpus(cfg.grid, ValueSpace::euclidean(1), seed ^ 0x4321, 6);
    for (double p : {1.0, 2.0}) {
      for (std::size_t i = 0; i + 1 < fam.size(); i += 2) {
        GridFunction conv = convolve(fam[i].fn, ker[i].fn);
        double lhs = lp_norm(conv, p);
        double rhs = std::pow(2.0 * 3.141592653589793, -0.5 * double(cfg.grid.n)) *
                     lp_norm(ker[i].fn, 1.0) * lp_norm(fam[i].fn, p);
        em.rows.push_back({"convolution", "p=" + fmt(p) + "," + fam[i].name, fmt(lhs / rhs)});
      }
    }
  }

  // maximal operator: ||M f||_p <= c ||f||_p
  {
    auto fam = make_corpus(cfg.grid, cfg.space, seed ^ 0xabcd, 8);
    for (double p : {1.5, 2.0, 4.0})
      for (const auto& nf : fam) {
        GridFunction m = hardy_littlewood_max(nf.fn);
        em.rows.push_back({"maximal", "p=" + fmt(p) + "," + nf.name,
                           fmt(lp_norm(m, p) / lp_norm(nf.fn, p))});
      }
  }

  // lift equivalence
  {
    auto fam = make_corpus(cfg.grid, cfg.space, seed ^ 0x7777, 6);
    SpaceParams prm = cfg.prm;
    for (double sig : {-2.0, -1.0, 1.0, 2.0})
      for (const auto& nf : fam) {
        double base = besov_norm(nf.fn, tb.sys, prm);
        SpaceParams shifted = SpaceParams::make(cfg.grid.n, prm.s - sig, prm.p, prm.q, prm.family);
        double lifted = besov_norm(lift(nf.fn, sig), tb.sys, shifted);
        em.rows.push_back({"lift", "sigma=" + fmt(sig) + "," + nf.name, fmt(lifted / base)});
      }
  }

  (void)jobs;
  em.emit();
  write_manifest(out_dir, cfg, seed, "test-inequalities");
  log_info("inequality battery written to " + out_dir);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"besovkit - equivalent norms and constructive decompositions on the torus"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out", input, corpus_dir, rep_file, original,
              format = "csv";
  std::uint64_t seed = 20101005;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "corpus seed");
  app.add_option("--jobs", jobs, "parallel workers");
  app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* gen = app.add_subcommand("gen-corpus", "generate the seeded test corpus");
  auto* norm = app.add_subcommand("norm", "compute norms for an input or corpus");
  norm->add_option("--input", input, "single .bkgf input");
  norm->add_option("--corpus", corpus_dir, "directory of .bkgf inputs");
  auto* dec = app.add_subcommand("decompose", "decompose an input function");
  dec->add_option("--input", input, "single .bkgf input");
  auto* rec = app.add_subcommand("reconstruct", "reconstruct from a representation file");
  rec->add_option("--rep", rep_file, "representation .bkrp file")->required();
  rec->add_option("--original", original, "original .bkgf for the error report")->required();
  auto* sweep = app.add_subcommand("sweep", "equivalence-ratio sweep over (s,p,q)");
  sweep->add_option("--corpus", corpus_dir, "directory of .bkgf inputs");
  auto* va = app.add_subcommand("validate-atoms", "validate atoms of a representation");
  va->add_option("--rep", rep_file, "harmonic-atomic .bkrp file");
  auto* ineq = app.add_subcommand("test-inequalities", "run the inequality battery");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (gen->parsed()) return cmd_gen_corpus(cfg, out_dir, seed);
    if (norm->parsed()) return cmd_norm(cfg, input, corpus_dir, out_dir, seed, jobs, format);
    if (dec->parsed()) return cmd_decompose(cfg, input, out_dir, seed, format);
    if (rec->parsed()) return cmd_reconstruct(cfg, rep_file, original, out_dir, format);
    if (sweep->parsed()) return cmd_sweep(cfg, corpus_dir, out_dir, seed, jobs, format);
    if (va->parsed()) return cmd_validate_atoms(cfg, rep_file, out_dir, seed, format);
    if (ineq->parsed()) return cmd_test_inequalities(cfg, out_dir, seed, jobs, format);
  } catch (const error& e) {
    std::cerr << "besovkit: " << errc_name(e.kind()) << ": " << e.what() << "\n";
    switch (e.kind()) {
      case errc::truncation_failure: return 4;
      case errc::quadrature_failure:
      case errc::convergence_failure:
      case errc::internal_inconsistency: return 3;
      default: return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "besovkit: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
