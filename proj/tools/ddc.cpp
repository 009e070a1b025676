// Command line front end for the dense coding library.
//
// One exit-code convention across all subcommands:
//   0  success (or completed scan)
//   1  input error: bad flags, malformed files, domain violations
//   2  negative result: verification failed, no family found, defect breach

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ddc/ddc.hpp"

namespace {

using nlohmann::json;

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string resolved(const std::string& path) {
    std::error_code ec;
    const auto abs = std::filesystem::absolute(path, ec);
    return ec ? path : abs.string();
}

// Sidecar <out>.manifest.json; the only place a timestamp appears, so data
// outputs stay byte-identical across runs of the same command line.
void write_manifest(const std::string& out_path, const std::string& subcommand, json inputs,
                    std::uint64_t seed) {
    json m;
    m["subcommand"] = subcommand;
    m["inputs"] = std::move(inputs);
    m["seed"] = seed;
    m["tool_version"] = ddc::kVersion;
    m["timestamp"] = iso8601_utc_now();
    const std::string path = out_path + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw ddc::InvalidArgument("cannot open for writing: " + path);
    out << m.dump(2) << '\n';
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (const char c : text) {
        if (c == ',') {
            toks.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    toks.push_back(cur);
    return toks;
}

// Accepts decimals and exact fractions: "0.6,0.2,0.2" or "2/3,1/3,0".
std::vector<double> parse_lambda_list(const std::string& text) {
    std::vector<double> vals;
    for (const std::string& tok : split_commas(text)) {
        if (tok.empty()) throw ddc::InvalidArgument("--lambdas: empty entry in '" + text + "'");
        const auto slash = tok.find('/');
        try {
            std::size_t used = 0;
            if (slash != std::string::npos) {
                const std::string num = tok.substr(0, slash);
                const std::string den = tok.substr(slash + 1);
                const long long p = std::stoll(num, &used);
                if (used != num.size()) throw std::invalid_argument(tok);
                const long long q = std::stoll(den, &used);
                if (used != den.size() || q == 0) throw std::invalid_argument(tok);
                vals.push_back(static_cast<double>(p) / static_cast<double>(q));
            } else {
                const double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                vals.push_back(v);
            }
        } catch (const std::exception&) {
            throw ddc::InvalidArgument("--lambdas: cannot parse '" + tok +
                                       "' (want a decimal or a fraction like 2/3)");
        }
    }
    return vals;
}

ddc::SchmidtSpectrum make_spectrum(std::size_t d, const std::string& text) {
    const std::vector<double> vals = parse_lambda_list(text);
    if (vals.size() != d)
        throw ddc::InvalidArgument("--lambdas: expected " + std::to_string(d) + " entries, got " +
                                   std::to_string(vals.size()));
    if (!std::is_sorted(vals.rbegin(), vals.rend()))
        std::cerr << "note: lambdas re-sorted into descending order\n";
    return ddc::SchmidtSpectrum(vals);
}

// Pin tokens: I, X, or X<k> with the exponent reduced mod d.
std::vector<ddc::UnitaryMatrix> parse_pins(const std::string& text, std::size_t d) {
    std::vector<ddc::UnitaryMatrix> pins;
    const ddc::UnitaryMatrix x = ddc::shift(d);
    for (const std::string& tok : split_commas(text)) {
        if (tok == "I") {
            pins.push_back(ddc::UnitaryMatrix::identity(d));
            continue;
        }
        if (!tok.empty() && tok[0] == 'X') {
            std::size_t power = 1;
            if (tok.size() > 1) {
                std::size_t used = 0;
                try {
                    const long long p = std::stoll(tok.substr(1), &used);
                    if (used != tok.size() - 1 || p < 0) throw std::invalid_argument(tok);
                    power = static_cast<std::size_t>(p);
                } catch (const std::exception&) {
                    throw ddc::InvalidArgument("--pin: cannot parse token '" + tok + "'");
                }
            }
            power %= d;
            ddc::ComplexMatrix m = ddc::ComplexMatrix::identity(d);
            for (std::size_t i = 0; i < power; ++i) m = ddc::matmul(m, x.mat());
            pins.emplace_back(std::move(m), 1e-12);
            continue;
        }
        throw ddc::InvalidArgument("--pin: unrecognized token '" + tok +
                                   "' (expected I, X, or X<k>)");
    }
    return pins;
}

std::string lambdas_text(const ddc::SchmidtSpectrum& s) {
    std::string out;
    char buf[32];
    for (std::size_t j = 0; j < s.d(); ++j) {
        std::snprintf(buf, sizeof buf, "%.6f", s.lambda(j));
        if (j) out += ' ';
        out += buf;
    }
    return out;
}

void emit(const json& doc) { std::cout << doc.dump(2) << '\n'; }

// -------------------------------------------------------------------- verify

struct VerifyOpts {
    std::string file;
    double tol = 1e-9;
    bool verbose = false;
    bool as_json = false;
};

int run_verify(const VerifyOpts& o) {
    const ddc::EncodingFamily f = ddc::load_family(o.file);
    const ddc::SchmidtSpectrum& s = f.spectrum();

    double worst = -1.0;
    std::size_t wa = 0, wb = 0;
    std::vector<std::array<double, 3>> rows;  // a, b, residual
    for (std::size_t a = 0; a < f.k(); ++a) {
        for (std::size_t b = a; b < f.k(); ++b) {
            const ddc::cx g = ddc::lambda_gram(f.unitary(a), f.unitary(b), s);
            const double r = std::abs(g - (a == b ? ddc::cx(1.0) : ddc::cx(0.0)));
            rows.push_back({static_cast<double>(a), static_cast<double>(b), r});
            if (r > worst) {
                worst = r;
                wa = a;
                wb = b;
            }
        }
    }
    const bool ok = worst <= o.tol;

    if (o.as_json) {
        json doc;
        doc["d"] = f.d();
        doc["k"] = f.k();
        doc["lambdas"] = s.lambdas();
        doc["tol"] = o.tol;
        doc["worst_pair"] = {wa, wb};
        doc["worst_residual"] = worst;
        doc["ok"] = ok;
        if (o.verbose) {
            json pairs = json::array();
            for (const auto& r : rows)
                pairs.push_back({{"a", static_cast<std::size_t>(r[0])},
                                 {"b", static_cast<std::size_t>(r[1])},
                                 {"residual", r[2]}});
            doc["pairs"] = std::move(pairs);
        }
        emit(doc);
    } else {
        std::printf("family: d = %zu, K = %zu, lambdas = %s\n", f.d(), f.k(),
                    lambdas_text(s).c_str());
        if (o.verbose) {
            std::printf("   a   b   residual\n");
            for (const auto& r : rows)
                std::printf("  %2zu  %2zu   %.3e\n", static_cast<std::size_t>(r[0]),
                            static_cast<std::size_t>(r[1]), r[2]);
        }
        std::printf("worst pair (%zu, %zu): residual %.3e (tol %.1e)\n", wa, wb, worst, o.tol);
        std::printf("%s\n", ok ? "PASS" : "FAIL");
    }
    return ok ? 0 : 2;
}

// -------------------------------------------------------------------- bounds

struct BoundsOpts {
    std::size_t d = 0;
    std::size_t k = 0;
    std::optional<std::size_t> m;
    bool lambda2_zero = false;
    bool as_json = false;
};

int run_bounds(const BoundsOpts& o) {
    const ddc::BoundReport rep = ddc::bound_report(o.d, o.k, o.m);
    std::optional<ddc::SpecialRoot> root;
    if (o.lambda2_zero) {
        if (o.d != 3)
            throw ddc::InvalidArgument("--lambda2-zero: the special root is specific to d = 3");
        root = ddc::d3_special_root();
    }

    if (o.as_json) {
        json doc;
        doc["d"] = rep.d;
        doc["k"] = rep.K;
        doc["counting"] = rep.wcsg;
        if (rep.dp1) doc["dp1_family"] = *rep.dp1;
        if (rep.shift_power)
            doc["shift_power"] = {{"value", rep.shift_power->value},
                                  {"m", rep.shift_power->m},
                                  {"non_binding", rep.shift_power->non_binding}};
        doc["applicable_min"] = rep.applicable_min;
        if (root) doc["special_root"] = {{"eta", root->eta_star}, {"lambda0", root->lambda0_star}};
        emit(doc);
    } else {
        std::printf("d = %zu, K = %zu\n", rep.d, rep.K);
        std::printf("  counting               lambda0 <= %.6f\n", rep.wcsg);
        if (rep.dp1) std::printf("  d+1 family             lambda0 <= %.6f\n", *rep.dp1);
        if (rep.shift_power)
            std::printf("  shift powers (m = %zu)   lambda0 <= %.6f%s\n", rep.shift_power->m,
                        rep.shift_power->value,
                        rep.shift_power->non_binding ? "  [not binding]" : "");
        std::printf("  applicable minimum     lambda0 <= %.6f\n", rep.applicable_min);
        if (root)
            std::printf("  lambda2 = 0 root       eta = %.6f, lambda0 = %.6f\n", root->eta_star,
                        root->lambda0_star);
    }
    return 0;
}

// ----------------------------------------------------------------- construct

struct ConstructPauliOpts {
    std::size_t d = 0;
    std::string out;
    bool as_json = false;
};

int run_construct_pauli(const ConstructPauliOpts& o) {
    const ddc::EncodingFamily fam = ddc::pauli_family(o.d);
    ddc::save_family(o.out, fam);
    write_manifest(o.out, "construct",
                   {{"construction", "pauli"}, {"d", o.d}, {"out", resolved(o.out)}}, 0);
    const double residual = ddc::verify_family(fam, 1e-9).worst_pair_residual;
    if (o.as_json) {
        emit({{"d", fam.d()}, {"k", fam.k()}, {"out", o.out}, {"worst_residual", residual}});
    } else {
        std::printf("wrote %zu-member d = %zu family to %s (worst pair residual %.3e)\n", fam.k(),
                    fam.d(), o.out.c_str(), residual);
    }
    return 0;
}

struct ConstructCompleteOpts {
    std::string in;
    std::string out;
    std::uint64_t seed = ddc::kDefaultCompletionSeed;
    bool as_json = false;
};

int run_construct_complete(const ConstructCompleteOpts& o) {
    const ddc::EncodingFamily f = ddc::load_family(o.in);
    ddc::UnitaryMatrix extra = ddc::UnitaryMatrix::identity(f.d());
    try {
        extra = ddc::complete_to_full(f, o.seed, 1e-9);
    } catch (const ddc::CompletionNotUnitary& e) {
        std::cerr << "completion failed: " << e.what() << '\n';
        return 2;
    }
    std::vector<ddc::UnitaryMatrix> members = f.unitaries();
    members.push_back(extra);
    const ddc::EncodingFamily full(f.spectrum(), std::move(members));
    ddc::save_family(o.out, full);
    write_manifest(o.out, "construct",
                   {{"construction", "complete"},
                    {"in", resolved(o.in)},
                    {"out", resolved(o.out)},
                    {"seed", o.seed}},
                   o.seed);
    const double residual = ddc::verify_family(full, 1e-7).worst_pair_residual;
    if (o.as_json) {
        emit({{"d", full.d()}, {"k", full.k()}, {"out", o.out}, {"worst_residual", residual}});
    } else {
        std::printf("appended the missing member; wrote %zu-member family to %s "
                    "(worst pair residual %.3e)\n",
                    full.k(), o.out.c_str(), residual);
    }
    return 0;
}

// -------------------------------------------------------------------- search

struct SearchOpts {
    std::size_t d = 0;
    std::string lambdas;
    std::size_t k = 0;
    std::string pin;
    std::uint64_t seed = 0;
    std::size_t restarts = 32;
    std::size_t max_iters = 5000;
    double tol = 1e-6;
    std::string out;
    bool as_json = false;
};

int run_search(const SearchOpts& o) {
    const ddc::SchmidtSpectrum s = make_spectrum(o.d, o.lambdas);
    ddc::SearchConfig cfg;
    cfg.target_k = o.k;
    cfg.restarts = o.restarts;
    cfg.max_iters = o.max_iters;
    cfg.success_residual = o.tol;
    cfg.seed = o.seed;
    if (!o.pin.empty()) cfg.pinned = parse_pins(o.pin, o.d);

    const ddc::SearchReport rep = ddc::find_family(s, cfg);

    if (rep.success && !o.out.empty()) {
        ddc::save_family(o.out, *rep.family);
        write_manifest(o.out, "search",
                       {{"d", o.d},
                        {"lambdas", s.lambdas()},
                        {"k", o.k},
                        {"pin", o.pin},
                        {"restarts", o.restarts},
                        {"max_iters", o.max_iters},
                        {"success_residual", o.tol},
                        {"out", resolved(o.out)}},
                       o.seed);
    }

    if (o.as_json) {
        json doc;
        doc["d"] = o.d;
        doc["k"] = o.k;
        doc["lambdas"] = s.lambdas();
        doc["seed"] = rep.seed;
        doc["success"] = rep.success;
        doc["residual"] = rep.final_residual;
        doc["restarts_used"] = rep.restarts_used;
        doc["iterations_used"] = rep.iterations_used;
        doc["certified"] = rep.certified;
        doc["certificate"] = rep.certificate;
        if (rep.success && !o.out.empty()) doc["out"] = o.out;
        emit(doc);
    } else {
        std::printf("search: d = %zu, K = %zu, lambdas = %s, seed %llu\n", o.d, o.k,
                    lambdas_text(s).c_str(), static_cast<unsigned long long>(o.seed));
        if (rep.success) {
            std::printf("success after %zu restart(s): residual %.3e\n", rep.restarts_used,
                        rep.final_residual);
            if (!o.out.empty()) std::printf("wrote family to %s\n", o.out.c_str());
        } else if (rep.certified) {
            std::printf("infeasible: %s\n", rep.certificate.c_str());
        } else {
            std::printf("no family found: best residual %.3e after %zu restarts\n",
                        rep.final_residual, rep.restarts_used);
        }
    }
    return rep.success ? 0 : 2;
}

// ---------------------------------------------------------------------- scan

struct ScanOpts {
    std::size_t d = 3;
    double step = 0.0;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t restarts = 32;
    std::size_t max_iters = 5000;
    bool as_json = false;
};

int run_scan(const ScanOpts& o) {
    ddc::SearchConfig cfg;
    cfg.restarts = o.restarts;
    cfg.max_iters = o.max_iters;
    cfg.seed = o.seed;
    const std::vector<ddc::ScanRow> rows = ddc::simplex_scan(o.d, o.step, cfg);

    std::ofstream out(o.out);
    if (!out) throw ddc::InvalidArgument("cannot open for writing: " + o.out);
    out << ddc::scan_csv(rows);
    write_manifest(o.out, "scan",
                   {{"d", o.d},
                    {"step", o.step},
                    {"restarts", o.restarts},
                    {"max_iters", o.max_iters},
                    {"out", resolved(o.out)}},
                   o.seed);

    if (o.as_json) {
        emit({{"d", o.d}, {"step", o.step}, {"rows", rows.size()}, {"out", o.out}});
    } else {
        std::printf("scanned %zu spectra at step %.3f; wrote %s\n", rows.size(), o.step,
                    o.out.c_str());
    }
    return 0;
}

// ------------------------------------------------------------------- augment

struct AugmentOpts {
    std::string file;
    std::string out;
    std::uint64_t seed = ddc::kDefaultCompletionSeed;
    double tol = 1e-9;
    bool as_json = false;
};

int run_augment(const AugmentOpts& o) {
    const ddc::EncodingFamily f = ddc::load_family(o.file);
    std::optional<ddc::AugmentedMessageMatrix> m;
    try {
        m = ddc::augment(f, o.seed, o.tol);
    } catch (const ddc::NotUnitary& e) {
        // Family passed the pair tolerance but the assembled matrix misses the
        // hard 1e-9 gate; that is a result, not an input problem.
        std::cerr << "augment failed: " << e.what() << '\n';
        return 2;
    }
    const double defect = ddc::unitarity_defect(m->mat());
    const std::vector<double> residuals = ddc::completion_deficit_residuals(*m, f.spectrum());

    const std::size_t d = f.d();
    const double kk = static_cast<double>(f.k());
    std::vector<double> lhs(d), weight(d);
    for (std::size_t j = 0; j < d; ++j) {
        lhs[j] = static_cast<double>(d) - kk * f.spectrum().lambda(j);
        double w = 0.0;
        for (std::size_t b = 0; b < m->completion_count(); ++b)
            for (std::size_t i = 0; i < d; ++i) w += std::norm(m->phi(b, i, j));
        weight[j] = w;
    }
    const bool ok =
        defect <= 1e-9 &&
        std::all_of(residuals.begin(), residuals.end(), [](double r) { return r <= 1e-9; });

    if (!o.out.empty()) {
        json doc;
        doc["d"] = d;
        doc["k"] = f.k();
        doc["lambdas"] = f.spectrum().lambdas();
        doc["matrix"] = ddc::matrix_to_json(m->mat());
        std::ofstream outf(o.out);
        if (!outf) throw ddc::InvalidArgument("cannot open for writing: " + o.out);
        outf << doc.dump(2) << '\n';
        write_manifest(o.out, "augment",
                       {{"family", resolved(o.file)}, {"out", resolved(o.out)}, {"tol", o.tol}},
                       o.seed);
    }

    if (o.as_json) {
        json doc;
        doc["d"] = d;
        doc["k"] = f.k();
        doc["completion_columns"] = m->completion_count();
        doc["defect"] = defect;
        doc["deficit_residuals"] = residuals;
        doc["ok"] = ok;
        if (!o.out.empty()) doc["out"] = o.out;
        emit(doc);
    } else {
        std::printf("augmented d = %zu family: K = %zu, completion columns %zu, defect %.3e\n", d,
                    f.k(), m->completion_count(), defect);
        std::printf("   j   d - K*lambda_j   completion weight   residual\n");
        for (std::size_t j = 0; j < d; ++j)
            std::printf("  %2zu   %14.6f   %17.6f   %.3e\n", j, lhs[j], weight[j], residuals[j]);
        if (!o.out.empty()) std::printf("wrote matrix to %s\n", o.out.c_str());
        std::printf("%s\n", ok ? "PASS" : "FAIL");
    }
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-qudit deterministic dense coding toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ddc::kVersion);

    VerifyOpts vo;
    auto* cmd_verify = app.add_subcommand("verify", "check a family file for Lambda-orthogonality");
    cmd_verify->add_option("family", vo.file, "family JSON file")->required();
    cmd_verify->add_option("--tol", vo.tol, "pass threshold on the worst pair residual");
    cmd_verify->add_flag("--verbose", vo.verbose, "print every pair residual");
    cmd_verify->add_flag("--json", vo.as_json, "machine-readable stdout");

    BoundsOpts bo;
    auto* cmd_bounds = app.add_subcommand("bounds", "feasibility caps on lambda0 for (d, K)");
    cmd_bounds->add_option("--d", bo.d, "qudit dimension")->required();
    cmd_bounds->add_option("--k", bo.k, "number of messages")->required();
    std::size_t bo_m = 0;
    auto* m_opt = cmd_bounds->add_option("--pinned-shift-powers", bo_m,
                                         "number of distinct shift powers held fixed");
    cmd_bounds->add_flag("--lambda2-zero", bo.lambda2_zero,
                         "also print the d = 3 special root on the lambda2 = 0 edge");
    cmd_bounds->add_flag("--json", bo.as_json, "machine-readable stdout");

    auto* cmd_construct = app.add_subcommand("construct", "built-in families");
    cmd_construct->require_subcommand(1);

    ConstructPauliOpts cpo;
    auto* cmd_pauli =
        cmd_construct->add_subcommand("pauli", "shift/clock family of d^2 members, uniform spectrum");
    cmd_pauli->add_option("--d", cpo.d, "qudit dimension")->required();
    cmd_pauli->add_option("--out", cpo.out, "output family file")->required();
    cmd_pauli->add_flag("--json", cpo.as_json, "machine-readable stdout");

    ConstructCompleteOpts cco;
    auto* cmd_complete = cmd_construct->add_subcommand(
        "complete", "append the forced last member to a (d^2-1)-family");
    cmd_complete->add_option("--in", cco.in, "input family file")->required();
    cmd_complete->add_option("--out", cco.out, "output family file")->required();
    cmd_complete->add_option("--seed", cco.seed, "completion seed");
    cmd_complete->add_flag("--json", cco.as_json, "machine-readable stdout");

    SearchOpts so;
    auto* cmd_search = app.add_subcommand("search", "numerical search for a K-member family");
    cmd_search->add_option("--d", so.d, "qudit dimension")->required();
    cmd_search->add_option("--lambdas", so.lambdas, "Schmidt coefficients, e.g. 2/3,1/3,0")
        ->required();
    cmd_search->add_option("--k", so.k, "number of messages")->required();
    cmd_search->add_option("--pin", so.pin, "members held fixed, e.g. I,X,X2");
    cmd_search->add_option("--seed", so.seed, "base RNG seed");
    cmd_search->add_option("--restarts", so.restarts, "independent restarts");
    cmd_search->add_option("--max-iters", so.max_iters, "iteration cap per restart");
    cmd_search->add_option("--tol", so.tol, "success threshold on the worst pair residual");
    cmd_search->add_option("--out", so.out, "family file written on success");
    cmd_search->add_flag("--json", so.as_json, "machine-readable stdout");

    ScanOpts sco;
    auto* cmd_scan = app.add_subcommand("scan", "map max K over the d = 3 spectrum simplex");
    cmd_scan->add_option("--d", sco.d, "qudit dimension (only 3 supported)");
    cmd_scan->add_option("--step", sco.step, "grid step in [0.005, 0.1]")->required();
    cmd_scan->add_option("--out", sco.out, "output CSV file")->required();
    cmd_scan->add_option("--seed", sco.seed, "base RNG seed");
    cmd_scan->add_option("--restarts", sco.restarts, "restarts per grid point and K");
    cmd_scan->add_option("--max-iters", sco.max_iters, "iteration cap per restart");
    cmd_scan->add_flag("--json", sco.as_json, "machine-readable stdout");

    AugmentOpts ao;
    auto* cmd_augment =
        app.add_subcommand("augment", "extend message columns to a full d^2 x d^2 unitary");
    cmd_augment->add_option("family", ao.file, "family JSON file")->required();
    cmd_augment->add_option("--out", ao.out, "output matrix JSON file");
    cmd_augment->add_option("--seed", ao.seed, "completion seed");
    cmd_augment->add_option("--tol", ao.tol, "pair tolerance for the verification precondition");
    cmd_augment->add_flag("--json", ao.as_json, "machine-readable stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_verify->parsed()) return run_verify(vo);
        if (cmd_bounds->parsed()) {
            if (m_opt->count() > 0) bo.m = bo_m;
            return run_bounds(bo);
        }
        if (cmd_pauli->parsed()) return run_construct_pauli(cpo);
        if (cmd_complete->parsed()) return run_construct_complete(cco);
        if (cmd_search->parsed()) return run_search(so);
        if (cmd_scan->parsed()) return run_scan(sco);
        if (cmd_augment->parsed()) return run_augment(ao);
    } catch (const ddc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
