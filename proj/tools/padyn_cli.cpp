// padyn: command-line front end for the p-adic dynamics and Gibbs measure library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "padyn/dynamics.hpp"
#include "padyn/gibbs.hpp"
#include "padyn/report.hpp"
#include "padyn/residue.hpp"
#include "padyn/roots.hpp"
#include "padyn/subshift.hpp"

namespace {

using namespace padyn;

enum Exit : int {
    kOk = 0,
    kUnexpected = 1,
    kBadArgs = 2,
    kRegime = 3,
    kNoMeasure = 4,
    kPrecision = 5,
    kGuard = 6,
    kDivision = 7,
    kDomain = 8,
    kNotRoot = 9,
    kNotSimple = 10,
    kPole = 11,
    kNotFixed = 12,
    kIdentical = 13,
    kBadField = 14,
    kIo = 15,
};

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotPrime:
        case ErrorKind::BadParameter: return kBadArgs;
        case ErrorKind::RegimeViolation: return kRegime;
        case ErrorKind::ZeroPartition: return kNoMeasure;
        case ErrorKind::PrecisionExhausted: return kPrecision;
        case ErrorKind::EnumerationGuard: return kGuard;
        case ErrorKind::DivisionByZero: return kDivision;
        case ErrorKind::OutOfDomain: return kDomain;
        case ErrorKind::NotARoot: return kNotRoot;
        case ErrorKind::NotSimpleRoot: return kNotSimple;
        case ErrorKind::PoleHit: return kPole;
        case ErrorKind::NotFixed: return kNotFixed;
        case ErrorKind::IdenticalPrefix: return kIdentical;
        case ErrorKind::BadField: return kBadField;
    }
    return kUnexpected;
}

struct CliConfig {
    std::int64_t p = 0;
    unsigned k = 2;
    std::string rho;
    std::optional<std::int64_t> N;
    std::string lambda;
    int precision = kDefaultPrecision;
    int m = 1;
    int max_m = kMaxPeriod;
    unsigned n = 2;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";

    std::string map = "ising";
    std::string A, C, a, b, c;
    std::string value;
    std::string poly;
    std::string window;
    std::string x0;
    std::string h;
    std::size_t steps = 50;
    std::optional<std::int64_t> tolerance;
    std::size_t samples = kDefaultScalingSamples;
    std::string field = "ti";
};

mpq_class rational_arg(const std::string& text, const std::string& name) {
    static const std::regex shape(R"(^-?[0-9]+(/-?[0-9]+)?$)");
    if (!std::regex_match(text, shape)) fail(ErrorKind::BadParameter, "--" + name + " expects m/n, got '" + text + "'");
    const auto slash = text.find('/');
    mpz_class num(text.substr(0, slash), 10);
    mpz_class den = slash == std::string::npos ? mpz_class(1) : mpz_class(text.substr(slash + 1), 10);
    if (den == 0) fail(ErrorKind::BadParameter, "--" + name + " has zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

mpq_class required_rational(const std::string& text, const std::string& name) {
    if (text.empty()) fail(ErrorKind::BadParameter, "--" + name + " is required");
    return rational_arg(text, name);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

LambdaTable lambda_arg(const std::string& text) {
    const auto parts = split(text, ',');
    static const std::regex integer(R"(^-?[0-9]+$)");
    if (parts.size() != 4) fail(ErrorKind::BadParameter, "--lambda expects l11,l1m,lm1,lmm");
    LambdaTable t{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::regex_match(parts[i], integer)) fail(ErrorKind::BadParameter, "--lambda entries must be integers");
        t[i] = std::stoll(parts[i]);
    }
    return t;
}

std::optional<ValuationWindow> window_arg(const std::string& text) {
    if (text.empty()) return std::nullopt;
    static const std::regex shape(R"(^(-?[0-9]+):(-?[0-9]+)$)");
    std::smatch mt;
    if (!std::regex_match(text, mt, shape)) fail(ErrorKind::BadParameter, "--window expects lo:hi");
    return ValuationWindow::interval(std::stoll(mt[1].str()), std::stoll(mt[2].str()));
}

ModelParams model_of(const CliConfig& cfg) {
    const mpq_class rho = required_rational(cfg.rho, "rho");
    if (!cfg.lambda.empty()) return ModelParams::lambda_model(cfg.p, cfg.k, rho, lambda_arg(cfg.lambda), cfg.precision);
    if (!cfg.N) fail(ErrorKind::BadParameter, "give --N for the Ising model or --lambda for a general table");
    return ModelParams::ising(cfg.p, cfg.k, rho, *cfg.N, cfg.precision);
}

RationalMap map_of(const CliConfig& cfg) {
    if (cfg.map == "ising") {
        if (!cfg.N) fail(ErrorKind::BadParameter, "--N is required for the ising map");
        return make_ising_potts(cfg.p, cfg.k, required_rational(cfg.rho, "rho"), *cfg.N, cfg.precision);
    }
    if (cfg.map == "lambda")
        return make_lambda_TI(cfg.p, cfg.k, required_rational(cfg.rho, "rho"), lambda_arg(cfg.lambda), cfg.precision);
    if (cfg.map == "small_rho_f")
        return make_small_rho_f(cfg.p, required_rational(cfg.A, "A"), required_rational(cfg.C, "C"), cfg.precision);
    if (cfg.map == "ep_g")
        return make_Ep_regime_g(cfg.p, required_rational(cfg.a, "a"), required_rational(cfg.b, "b"),
                                required_rational(cfg.c, "c"), cfg.precision);
    fail(ErrorKind::BadParameter, "unknown map '" + cfg.map + "'");
}

struct Output {
    std::string text;
};

Output as_json(const json& j) { return {j.dump(2) + "\n"}; }

void require_json(const CliConfig& cfg, const std::string& cmd) {
    if (cfg.format != "json") fail(ErrorKind::BadParameter, cmd + " supports --format json only");
}

Output cmd_norm(const CliConfig& cfg) {
    require_json(cfg, "norm");
    const mpq_class v = required_rational(cfg.value, "value");
    const auto x = PAdicNumber::from_rational(v, cfg.p, cfg.precision);
    json j = {{"value", v.get_str()}, {"prime", cfg.p}, {"norm", norm_json(cfg.p, x.norm())}, {"padic", x}};
    return as_json(j);
}

Output cmd_roots(const CliConfig& cfg) {
    require_json(cfg, "roots");
    json j;
    if (cfg.poly.empty()) {
        j = kth_roots_of_minus_one_mod_p(cfg.p, cfg.k);
        return as_json(j);
    }
    std::vector<mpq_class> coeffs;
    for (const auto& c : split(cfg.poly, ',')) coeffs.push_back(rational_arg(c, "poly"));
    const RationalPolynomial poly(coeffs);
    const auto w = window_arg(cfg.window).value_or(newton_window(poly, cfg.p));
    j = {{"polynomial", poly.str()}, {"window", w}};
    j.update(json(poly_roots_Qp(poly, cfg.p, w, cfg.precision)));
    return as_json(j);
}

Output cmd_fixpoints(const CliConfig& cfg) {
    require_json(cfg, "fixpoints");
    const auto map = map_of(cfg);
    const auto w = window_arg(cfg.window);
    return as_json(fixed_points_json(map, w ? fixed_points(map, *w) : fixed_points(map)));
}

Output cmd_orbit(const CliConfig& cfg) {
    require_json(cfg, "orbit");
    const auto map = map_of(cfg);
    const auto x0 = PAdicNumber::from_rational(required_rational(cfg.x0, "x0"), cfg.p, cfg.precision);
    std::vector<PAdicNumber> targets;
    for (const auto& r : fixed_points(map).points) targets.push_back(r.point);
    const std::int64_t tol = cfg.tolerance.value_or(fixed_tolerance(cfg.precision));
    json j = orbit_json(map, iterate_orbit(map, x0, cfg.steps, tol, targets));
    j["targets"] = targets;
    return as_json(j);
}

Output cmd_subshift(const CliConfig& cfg) {
    require_json(cfg, "subshift");
    if (!cfg.N) fail(ErrorKind::BadParameter, "--N is required");
    const auto setup =
        build_ising_repeller(cfg.p, cfg.k, required_rational(cfg.rho, "rho"), *cfg.N, cfg.precision, cfg.samples, cfg.seed);
    return as_json(repeller_json(setup, incidence_matrix(setup), verify_shift_conjugacy(setup, cfg.max_m)));
}

MeasureCensus census_of(const ModelParams& m) { return m.is_ising() ? ti_census_ising(m) : lambda_k2_analysis(m); }

Output cmd_census(const CliConfig& cfg) {
    const auto m = model_of(cfg);
    const auto c = census_of(m);
    if (cfg.format == "csv") {
        std::ostringstream out;
        out << "index,h_valuation,class,verdict\n";
        for (std::size_t i = 0; i < c.entries.size(); ++i)
            out << i << ',' << c.entries[i].h.valuation() << ',' << to_string(c.entries[i].cls) << ','
                << to_string(c.entries[i].boundedness.verdict) << '\n';
        return {out.str()};
    }
    return as_json(census_json(c));
}

std::vector<BoundaryField> fields_of(const CliConfig& cfg, const ModelParams& m) {
    if (!cfg.h.empty())
        return {BoundaryField::translation_invariant(
            PAdicNumber::from_rational(rational_arg(cfg.h, "h"), m.p, m.precision))};
    if (cfg.field == "ti") {
        std::vector<BoundaryField> out;
        for (const auto& e : census_of(m).entries) out.push_back(BoundaryField::translation_invariant(e.h));
        return out;
    }
    if (cfg.field == "periodic") return hm_periodic_fields(m, cfg.m);
    fail(ErrorKind::BadParameter, "--field must be ti or periodic");
}

Output cmd_compat(const CliConfig& cfg) {
    require_json(cfg, "compat");
    const auto m = model_of(cfg);
    json reports = json::array();
    for (const auto& f : fields_of(cfg, m)) {
        json j = compatibility_json(m, check_compatibility(m, cfg.n, f));
        j["field"] = f.plus;
        reports.push_back(j);
    }
    return as_json({{"params", params_json(m)}, {"n", cfg.n}, {"fields", reports}});
}

Output cmd_bounded(const CliConfig& cfg) {
    const auto m = model_of(cfg);
    std::vector<PAdicNumber> hs;
    if (!cfg.h.empty())
        hs.push_back(PAdicNumber::from_rational(rational_arg(cfg.h, "h"), m.p, m.precision));
    else
        for (const auto& e : census_of(m).entries) hs.push_back(e.h);
    std::vector<BoundednessReport> reports;
    for (const auto& h : hs) reports.push_back(m.is_ising() ? boundedness_classify(m, h) : boundedness_from_profile(m, h));
    if (cfg.format == "csv") {
        std::ostringstream out;
        out << "measure,n,valuation_of_measure_norm\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& v = reports[i].profile.min_valuation;
            for (std::size_t n = 1; n <= v.size(); ++n) out << i << ',' << n << ',' << v[n - 1] << '\n';
        }
        return {out.str()};
    }
    json rows = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        json r = boundedness_json(m.p, reports[i]);
        r["h"] = hs[i];
        rows.push_back(r);
    }
    return as_json({{"params", params_json(m)}, {"measures", rows}});
}

Output cmd_periodic(const CliConfig& cfg) {
    require_json(cfg, "periodic");
    const auto map = map_of(cfg);
    return as_json(periodic_json(map, periodic_points(map, cfg.m)));
}

int default_precision() {
    if (const char* env = std::getenv("PADYN_PRECISION")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring invalid PADYN_PRECISION='" << env << "'\n";
    }
    return kDefaultPrecision;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic dynamics and Gibbs measures on Cayley trees"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    CliConfig cfg;
    cfg.precision = default_precision();

    auto common = [&](CLI::App* sub) {
        sub->add_option("--p", cfg.p, "prime")->required();
        sub->add_option("--precision", cfg.precision, "relative p-adic digits (env PADYN_PRECISION)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out, "write output to a file instead of stdout");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto model = [&](CLI::App* sub) {
        sub->add_option("--k", cfg.k, "tree order / outer power")->check(CLI::PositiveNumber);
        sub->add_option("--rho", cfg.rho, "coupling as m/n");
        sub->add_option("--N", cfg.N, "Ising exponent, theta = rho^(2N)");
        sub->add_option("--lambda", cfg.lambda, "interaction table l11,l1m,lm1,lmm");
    };
    auto map_options = [&](CLI::App* sub) {
        model(sub);
        sub->add_option("--map", cfg.map, "ising, lambda, small_rho_f or ep_g")
            ->check(CLI::IsMember({"ising", "lambda", "small_rho_f", "ep_g"}));
        sub->add_option("--A", cfg.A, "small-rho A");
        sub->add_option("--C", cfg.C, "small-rho C");
        sub->add_option("--a", cfg.a, "E_p regime a");
        sub->add_option("--b", cfg.b, "E_p regime b");
        sub->add_option("--c", cfg.c, "E_p regime c");
        sub->add_option("--window", cfg.window, "valuation window lo:hi");
    };

    auto* norm = app.add_subcommand("norm", "p-adic norm and expansion of a rational");
    common(norm);
    norm->add_option("--value", cfg.value, "rational m/n")->required();

    auto* roots = app.add_subcommand("roots", "k-th roots of -1 mod p, or roots of a polynomial over Q_p");
    common(roots);
    roots->add_option("--k", cfg.k, "degree")->check(CLI::PositiveNumber);
    roots->add_option("--poly", cfg.poly, "coefficients c0,c1,... as rationals");
    roots->add_option("--window", cfg.window, "valuation window lo:hi");

    auto* fix = app.add_subcommand("fixpoints", "fixed points and their classification");
    common(fix);
    map_options(fix);

    auto* orbit = app.add_subcommand("orbit", "forward orbit of a rational starting point");
    common(orbit);
    map_options(orbit);
    orbit->add_option("--x0", cfg.x0, "starting point m/n")->required();
    orbit->add_option("--steps", cfg.steps, "step budget");
    orbit->add_option("--tolerance", cfg.tolerance, "stop when within p^-t of a fixed point");

    auto* sub = app.add_subcommand("subshift", "Ising repeller, incidence matrix and shift conjugacy");
    common(sub);
    model(sub);
    sub->add_option("--m", cfg.max_m, "largest period checked")->check(CLI::Range(1, kMaxPeriod));
    sub->add_option("--samples", cfg.samples, "sampled pairs per ball");
    sub->add_option("--seed", cfg.seed, "sampling seed");

    auto* census = app.add_subcommand("census", "translation-invariant measures and phase verdict");
    common(census);
    model(census);

    auto* compat = app.add_subcommand("compat", "brute-force compatibility of finite-volume measures");
    common(compat);
    model(compat);
    compat->add_option("--n", cfg.n, "tree depth")->check(CLI::PositiveNumber);
    compat->add_option("--h", cfg.h, "explicit translation-invariant field m/n");
    compat->add_option("--field", cfg.field, "ti or periodic")->check(CLI::IsMember({"ti", "periodic"}));
    compat->add_option("--m", cfg.m, "period for --field periodic")->check(CLI::Range(1, kMaxPeriod));

    auto* bounded = app.add_subcommand("bounded", "boundedness verdicts and cylinder-norm profiles");
    common(bounded);
    model(bounded);
    bounded->add_option("--h", cfg.h, "explicit field m/n");

    auto* periodic = app.add_subcommand("periodic", "periodic points and cycles");
    common(periodic);
    map_options(periodic);
    periodic->add_option("--m", cfg.m, "period")->check(CLI::Range(1, kMaxPeriod));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadArgs;
    }

    Output result;
    try {
        if (*norm) result = cmd_norm(cfg);
        else if (*roots) result = cmd_roots(cfg);
        else if (*fix) result = cmd_fixpoints(cfg);
        else if (*orbit) result = cmd_orbit(cfg);
        else if (*sub) result = cmd_subshift(cfg);
        else if (*census) result = cmd_census(cfg);
        else if (*compat) result = cmd_compat(cfg);
        else if (*bounded) result = cmd_bounded(cfg);
        else if (*periodic) result = cmd_periodic(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUnexpected;
    }

    if (cfg.out.empty()) {
        std::cout << result.text;
        return kOk;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!(file << result.text)) {
        std::cerr << "error: cannot write " << cfg.out << '\n';
        return kIo;
    }
    return kOk;
}
