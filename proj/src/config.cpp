#include "opfree/config.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "opfree/cumulant.hpp"
#include "opfree/verify.hpp"

namespace opfree::cli {

using json = nlohmann::json;
using bpoly::BPolynomial;
using covmap::CovarianceMatrix;
using cumulant::CumulantTable;
using fock::FockModel;
using matalg::AlgebraContext;

namespace {

Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigurationError("config: " + what + " must be a non-empty row array");
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigurationError("config: ragged rows in " + what);
    for (size_t c = 0; c < cols; ++c) {
      const auto& cell = j[r][c];
      if (cell.is_number()) {
        m(r, c) = cell.get<double>();
      } else if (cell.is_array() && cell.size() == 2) {
        m(r, c) = Complex(cell[0].get<double>(), cell[1].get<double>());
      } else {
        throw ConfigurationError("config: entries of " + what +
                                 " must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

CovSpec parse_covariance(const json& j) {
  CovSpec spec;
  if (!j.contains("kind")) throw ConfigurationError("config: covariance.kind missing");
  spec.kind = j.at("kind").get<std::string>();
  spec.index_count = j.value("index_count", 1);
  spec.symmetrize = j.value("symmetrize", false);
  if (spec.kind == "kraus") {
    if (!j.contains("kraus")) throw ConfigurationError("config: covariance.kraus missing");
    for (const auto& k : j.at("kraus")) spec.kraus.push_back(parse_matrix(k, "kraus operator"));
  } else if (spec.kind == "table") {
    if (!j.contains("table")) throw ConfigurationError("config: covariance.table missing");
    for (const auto& row : j.at("table")) {
      std::vector<Matrix> entries;
      for (const auto& cell : row) entries.push_back(parse_matrix(cell, "table entry"));
      spec.table.push_back(std::move(entries));
    }
  } else if (spec.kind == "block") {
    if (!j.contains("parts")) throw ConfigurationError("config: covariance.parts missing");
    for (const auto& part : j.at("parts")) spec.parts.push_back(parse_covariance(part));
  } else if (spec.kind != "diagonal-EB") {
    throw ConfigurationError("config: unknown covariance kind '" + spec.kind + "'");
  }
  return spec;
}

CovarianceMatrix build_covariance(const AlgebraContext& ctx, const CovSpec& spec) {
  CovarianceMatrix cov = [&]() {
    if (spec.kind == "diagonal-EB")
      return CovarianceMatrix::diagonal_expectation(ctx, spec.index_count);
    if (spec.kind == "kraus")
      return CovarianceMatrix::from_kraus(ctx, spec.index_count, spec.kraus);
    if (spec.kind == "table")
      return CovarianceMatrix::from_table(ctx, spec.index_count, spec.table);
    // block
    if (spec.parts.empty()) throw ConfigurationError("config: empty block covariance");
    CovarianceMatrix acc = build_covariance(ctx, spec.parts[0]);
    for (size_t p = 1; p < spec.parts.size(); ++p)
      acc = CovarianceMatrix::block_diagonal(acc, build_covariance(ctx, spec.parts[p]));
    return acc;
  }();
  if (spec.symmetrize) {
    auto [sym, rep] = cov.symmetrized();
    if (!rep.completely_positive(ctx.tol().gram_null_rel))
      throw ValidationError("covariance: symmetrization broke complete positivity");
    return std::move(sym);
  }
  return cov;
}

int cap_of(const RunConfig& config, const std::string& name, int fallback) {
  auto it = config.degree_caps.find(name);
  return it == config.degree_caps.end() ? fallback : it->second;
}

CumulantTable::MomentFn fock_word_moments(const FockModel& model,
                                          const std::vector<BPolynomial>& letter_ops) {
  const AlgebraContext& ctx = model.ctx();
  return [&model, &ctx, letter_ops](const std::vector<int>& letters,
                                    const std::vector<int>& interior) {
    BPolynomial word = letter_ops.at(static_cast<size_t>(letters.at(0)));
    for (size_t k = 1; k < letters.size(); ++k)
      word = word * BPolynomial::constant(ctx, ctx.basis()[interior[k - 1]]) *
             letter_ops.at(static_cast<size_t>(letters[k]));
    return model.expectation(word);
  };
}

report::Report covariance_report(const BuiltModel& built, double tolerance) {
  report::Report rep;
  rep.suite = "covariance";
  rep.identity = "complete positivity and tau-symmetry of the covariance matrix";
  const auto cp = built.eta->check_completely_positive();
  const auto ts = built.eta->check_tau_symmetric();
  rep.add("choi minimum eigenvalue",
          "complete positivity and tau-symmetry of the covariance matrix",
          std::max(0.0, -cp.choi_min_eig), built.ctx->tol().gram_null_rel);
  rep.add("tau-symmetry defect",
          "complete positivity and tau-symmetry of the covariance matrix",
          ts.tau_symmetry_defect, tolerance);
  rep.add("B-image defect", "covariance entries land in B", built.eta->image_defect(),
          built.ctx->tol().equality);
  return rep;
}

report::Report scope_report() {
  report::Report rep;
  rep.suite = "scope";
  rep.identity = "desk-scale scope of the infinite-dimensional statements";
  rep.note =
      "the center identity Z(B v (B' ∩ M)) = Z(B) and the absence-of-atoms statements "
      "concern infinite-dimensional von Neumann algebras and cannot be decided on a "
      "finite-dimensional truncation; their finite-dimensional ingredients are certified "
      "by the integration-by-parts, conjugate-cumulants, adjoint-formula and norm-bound suites";
  rep.add("scope note recorded", "desk-scale scope of the infinite-dimensional statements", 0.0,
          1.0);
  return rep;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config: parse error in '" + path + "': " + e.what());
  }

  RunConfig config;
  try {
    const auto& alg = j.at("algebra");
    for (const auto& b : alg.at("blocks")) {
      if (b.is_array() && b.size() == 2)
        config.blocks.emplace_back(b[0].get<int>(), b[1].get<int>());
      else if (b.is_object())
        config.blocks.emplace_back(b.at("size").get<int>(), b.value("mult", 1));
      else if (b.is_number())
        config.blocks.emplace_back(b.get<int>(), 1);
      else
        throw ConfigurationError("config: malformed algebra block");
    }
    if (alg.contains("trace_weights"))
      for (const auto& w : alg.at("trace_weights")) config.block_weights.push_back(w.get<double>());
    if (alg.contains("names"))
      for (const auto& [key, value] : alg.at("names").items())
        config.named_matrices[key] = parse_matrix(value, "named matrix '" + key + "'");

    config.covariance = parse_covariance(j.at("covariance"));
    config.depth = j.value("depth", 3);
    config.seed = j.value("seed", static_cast<std::uint64_t>(1));
    if (j.contains("tolerance")) {
      const auto& t = j.at("tolerance");
      config.suite_tolerance = t.value("suite", 1e-9);
      config.tol.equality = t.value("equality", config.tol.equality);
      config.tol.gram_null_rel = t.value("gram_null_rel", config.tol.gram_null_rel);
      config.tol.norm_slack = t.value("norm_slack", config.tol.norm_slack);
    }
    if (j.contains("degree_caps"))
      for (const auto& [key, value] : j.at("degree_caps").items())
        config.degree_caps[key] = value.get<int>();
    if (j.contains("suites"))
      for (const auto& s : j.at("suites")) config.suites.push_back(s.get<std::string>());
    if (j.contains("suite_params")) {
      const auto& p = j.at("suite_params");
      if (p.contains("freeness_families"))
        for (const auto& fam : p.at("freeness_families"))
          config.freeness_families.push_back(fam.get<std::vector<int>>());
      if (p.contains("psi_word_block"))
        config.psi_word_block = p.at("psi_word_block").get<std::vector<int>>();
      if (p.contains("psi_pair_block"))
        config.psi_pair_block = p.at("psi_pair_block").get<std::vector<int>>();
      if (p.contains("convolution_t"))
        config.convolution_t = p.at("convolution_t").get<std::vector<double>>();
      if (p.contains("kernel_poly")) config.kernel_poly = p.at("kernel_poly").get<std::string>();
    }
    config.out_path = j.value("out", "");
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }

  const auto& names = registered_suites();
  for (const auto& s : config.suites)
    if (std::none_of(names.begin(), names.end(),
                     [&s](const SuiteInfo& info) { return info.name == s; }))
      throw ConfigurationError("config: unknown suite '" + s + "'");
  return config;
}

BuiltModel build_model(const RunConfig& config) {
  BuiltModel built;
  built.ctx = std::make_unique<AlgebraContext>(
      AlgebraContext::multi_matrix(config.blocks, config.block_weights, config.tol));
  built.eta = std::make_unique<CovarianceMatrix>(build_covariance(*built.ctx, config.covariance));
  built.model = std::make_unique<FockModel>(*built.ctx, *built.eta, config.depth);
  return built;
}

const std::vector<SuiteInfo>& registered_suites() {
  static const std::vector<SuiteInfo> suites = {
      {"covariance", "complete positivity and tau-symmetry of the covariance matrix"},
      {"oracle-equivalence", "Fock expectations realize the pair-partition semicircular law"},
      {"traciality", "tau composed with E_B is tracial under tau-symmetric covariance"},
      {"integration-by-parts", "conjugate-variable integration by parts"},
      {"conjugate-cumulants", "cumulant characterization of conjugate systems"},
      {"freeness", "vanishing mixed cumulants under freeness with amalgamation"},
      {"adjoint-formula", "adjoint of the eta-derivative on p·e_i·q vectors"},
      {"norm-bound", "adjoint vectors are bounded by the operator norm of the left factor"},
      {"isometries", "conjugation and free-product embeddings preserve the pairing"},
      {"kernel-annihilation", "kernel projections annihilate the derivative"},
      {"free-convolution", "second-order cumulants add under free convolution"},
      {"scope", "desk-scale scope of the infinite-dimensional statements"},
  };
  return suites;
}

namespace {

std::vector<std::string> default_suites(const RunConfig& config) {
  std::vector<std::string> out{"covariance",       "oracle-equivalence",  "traciality",
                               "integration-by-parts", "conjugate-cumulants", "adjoint-formula",
                               "norm-bound",       "isometries",          "kernel-annihilation",
                               "scope"};
  if (config.covariance.kind == "block" || !config.freeness_families.empty())
    out.insert(out.begin() + 5, "freeness");
  if (config.covariance.kind == "block" && config.covariance.parts.size() == 2 &&
      config.covariance.parts[0].index_count == config.covariance.parts[1].index_count)
    out.push_back("free-convolution");
  return out;
}

std::vector<std::vector<int>> block_families(const CovSpec& spec) {
  std::vector<std::vector<int>> families;
  int offset = 0;
  for (const auto& part : spec.parts) {
    std::vector<int> fam;
    const int count = part.kind == "block" ? 0 : part.index_count;
    for (int i = 0; i < count; ++i) fam.push_back(offset + i);
    offset += count;
    families.push_back(std::move(fam));
  }
  return families;
}

report::Report free_convolution_report(const BuiltModel& built, const RunConfig& config,
                                       int d_max, double tolerance) {
  const AlgebraContext& ctx = *built.ctx;
  const FockModel& model = *built.model;
  report::Report rep;
  rep.suite = "free-convolution";
  rep.identity = "second-order cumulants add under free convolution";
  rep.environment.emplace_back("d_max", std::to_string(d_max));

  if (config.covariance.kind != "block" || config.covariance.parts.size() != 2 ||
      config.covariance.parts[0].index_count != config.covariance.parts[1].index_count) {
    rep.vacuous = true;
    rep.note = "needs a two-part block covariance with matching index counts";
    return rep;
  }
  const int m = config.covariance.parts[0].index_count;
  const CovarianceMatrix eta1 = build_covariance(ctx, config.covariance.parts[0]);
  const CovarianceMatrix eta2 = build_covariance(ctx, config.covariance.parts[1]);

  const CumulantTable base = CumulantTable::semicircular(eta1, d_max);
  for (double t : config.convolution_t) {
    // x_i(t) = s'_i + sqrt(t) s_i in the block-free doubled model
    std::vector<BPolynomial> letter_ops;
    for (int i = 0; i < m; ++i)
      letter_ops.push_back(BPolynomial::letter(ctx, i) +
                           BPolynomial::letter(ctx, m + i) * Complex(std::sqrt(t)));
    const auto empirical =
        CumulantTable::from_moments(ctx, m, 0, d_max, fock_word_moments(model, letter_ops));
    const auto convolved = base.free_convolve_semicircular(eta2, t);
    const auto direct =
        CumulantTable::semicircular(CovarianceMatrix::sum(eta1, eta2.scaled(t)), d_max);

    const std::string tag = "t=" + std::to_string(t);
    rep.add(tag + " empirical vs convolved", rep.identity,
            empirical.max_difference(convolved), tolerance);
    rep.add(tag + " convolved vs direct", rep.identity, convolved.max_difference(direct),
            tolerance);

    // cross-check against a model built directly with the summed covariance
    const CovarianceMatrix summed = CovarianceMatrix::sum(eta1, eta2.scaled(t));
    FockModel direct_model(ctx, summed, config.depth);
    std::vector<BPolynomial> plain;
    for (int i = 0; i < m; ++i) plain.push_back(BPolynomial::letter(ctx, i));
    const auto direct_empirical =
        CumulantTable::from_moments(ctx, m, 0, d_max, fock_word_moments(direct_model, plain));
    rep.add(tag + " direct model vs convolved", rep.identity,
            direct_empirical.max_difference(convolved), tolerance);
  }
  return rep;
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& console) {
  BuiltModel built = build_model(config);
  const AlgebraContext& ctx = *built.ctx;
  const FockModel& model = *built.model;
  const double tolerance = config.suite_tolerance;
  Rng rng(config.seed);

  std::vector<std::string> selected = config.suites.empty() ? default_suites(config)
                                                            : config.suites;
  const int m = built.eta->index_count();
  std::vector<BPolynomial> s_letters;
  for (int i = 0; i < m; ++i) s_letters.push_back(BPolynomial::letter(ctx, i));

  std::vector<report::Report> reports;
  for (const auto& name : selected) {
    if (name == "covariance") {
      reports.push_back(covariance_report(built, tolerance));
    } else if (name == "oracle-equivalence") {
      const int cap = std::min(cap_of(config, "oracle", 6), model.exact_degree());
      reports.push_back(verify::check_oracle_equivalence(model, cap, tolerance));
    } else if (name == "traciality") {
      reports.push_back(verify::check_traciality(model, std::min(3, model.depth()), 20,
                                                 tolerance, rng));
    } else if (name == "integration-by-parts") {
      const int cap = std::min(cap_of(config, "ibp", 5), model.exact_degree() - 1);
      reports.push_back(verify::check_integration_by_parts(model, s_letters, cap, tolerance, &rng).rep);
    } else if (name == "conjugate-cumulants") {
      const int cap = std::min(cap_of(config, "conjugate", 5), model.exact_degree() - 1);
      std::vector<BPolynomial> letter_ops = s_letters;
      for (int i = 0; i < m; ++i) letter_ops.push_back(s_letters[i]);  // xi_i = s_i
      const auto table = CumulantTable::from_moments(ctx, m, m, cap + 1,
                                                     fock_word_moments(model, letter_ops));
      reports.push_back(cumulant::check_conjugate_cumulants(*built.eta, table, cap, tolerance).rep);
    } else if (name == "freeness") {
      std::vector<std::vector<int>> families = config.freeness_families;
      if (families.empty() && config.covariance.kind == "block")
        families = block_families(config.covariance);
      const int cap = std::min(cap_of(config, "freeness", 6), model.exact_degree());
      const auto table =
          CumulantTable::from_moments(ctx, m, 0, cap, fock_word_moments(model, s_letters));
      reports.push_back(cumulant::check_amalgamated_freeness(table, families, cap, 1e-10));
    } else if (name == "adjoint-formula") {
      int pq = cap_of(config, "pq", 2);
      int rdeg = cap_of(config, "r", 2);
      while (pq > 0 && 2 * pq + 1 + rdeg > model.exact_degree()) --pq;
      auto rep = verify::check_adjoint_formula(model, pq, rdeg, tolerance, rng);
      if (pq < cap_of(config, "pq", 2))
        rep.environment.emplace_back("pq_clamped_for_depth", std::to_string(pq));
      reports.push_back(std::move(rep));
    } else if (name == "norm-bound") {
      std::vector<BPolynomial> ps;
      ps.push_back(BPolynomial::one(ctx));
      for (const auto& b : ctx.basis()) ps.push_back(BPolynomial::constant(ctx, b));
      for (int i = 0; i < m; ++i) ps.push_back(s_letters[i]);
      if (model.exact_degree() >= 6)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) ps.push_back(s_letters[i] * s_letters[j]);
      reports.push_back(verify::check_norm_bound(model, ps, ctx.tol().norm_slack));
    } else if (name == "isometries") {
      reports.push_back(verify::check_j_isometry(model, 25, tolerance, rng));
      if (!config.psi_word_block.empty() && !config.psi_pair_block.empty()) {
        reports.push_back(verify::check_psi_isometry(model, config.psi_word_block,
                                                     config.psi_pair_block, 2, tolerance));
      } else if (config.covariance.kind == "block") {
        const auto families = block_families(config.covariance);
        if (families.size() >= 2)
          reports.push_back(
              verify::check_psi_isometry(model, families[0], families[1], 2, tolerance));
      }
    } else if (name == "kernel-annihilation") {
      std::map<std::string, Matrix> names = config.named_matrices;
      for (int b = 0; b < ctx.dim(); ++b) names["b" + std::to_string(b)] = ctx.basis()[b];
      names["one"] = Matrix::Identity(ctx.ambient_dim(), ctx.ambient_dim());
      BPolynomial P = BPolynomial::constant(ctx, ctx.basis()[0]) * s_letters[0];
      if (!config.kernel_poly.empty())
        P = bpoly::parse_polynomial(ctx, config.kernel_poly, names);
      auto rep = verify::check_kernel_annihilation(model, P, tolerance);
      rep.environment.emplace_back("P", P.to_string(&names));
      reports.push_back(std::move(rep));
    } else if (name == "free-convolution") {
      reports.push_back(
          free_convolution_report(built, config, cap_of(config, "convolution", 4), tolerance));
    } else if (name == "scope") {
      reports.push_back(scope_report());
    }
  }

  // shared environment on the first report for traceability
  std::ostringstream body;
  body << "opfree verification report\n";
  body << "model: ambient=" << ctx.ambient_dim() << " dimB=" << ctx.dim()
       << " index_count=" << m << " depth=" << model.depth()
       << " exact_degree=" << model.exact_degree() << " seed=" << config.seed << "\n";
  body << "levels:";
  for (int d : model.level_dims()) body << " " << d;
  body << "\n\n";
  report::write_all(body, reports);

  console << body.str();
  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) throw ConfigurationError("cannot write report to '" + config.out_path + "'");
    out << body.str();
  }

  for (const auto& rep : reports)
    if (!rep.passed()) return 1;
  return 0;
}

int describe_command(const RunConfig& config, std::ostream& console) {
  BuiltModel built = build_model(config);
  const AlgebraContext& ctx = *built.ctx;
  const auto cp = built.eta->check_completely_positive();
  const auto ts = built.eta->check_tau_symmetric();
  console << "algebra: ambient=" << ctx.ambient_dim() << " dimB=" << ctx.dim() << "\n";
  console << "covariance: index_count=" << built.eta->index_count()
          << " choi_min_eig=" << report::format_defect(cp.choi_min_eig)
          << " tau_symmetry_defect=" << report::format_defect(ts.tau_symmetry_defect) << "\n";
  console << "bimodule: generators=" << built.model->bimodule().generator_count()
          << " dimension=" << built.model->bimodule().dimension()
          << " gram_eig=[" << report::format_defect(built.model->bimodule().gram_min_eig) << ","
          << report::format_defect(built.model->bimodule().gram_max_eig) << "]\n";
  console << "levels: ";
  const auto& dims = built.model->level_dims();
  for (size_t i = 0; i < dims.size(); ++i) console << (i ? "," : "") << dims[i];
  console << "\n";
  console << "exact to degree " << built.model->exact_degree() << "\n";
  return 0;
}

void list_suites(std::ostream& console) {
  for (const auto& info : registered_suites())
    console << info.name << ": " << info.identity << "\n";
}

}  // namespace opfree::cli
