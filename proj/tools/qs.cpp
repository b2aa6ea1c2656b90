// qs: command-line driver for the exact q-series engine.
//
// Subcommands: expand, coeffs, verify-congruence, build-l, decompose,
// transform, certify, oracle.  Exit codes: 0 all checks pass, 1 a
// mathematical verification failed, 2 usage error, 3 precision exhausted.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qseries/certify.hpp"
#include "qseries/genfun.hpp"
#include "qseries/grammar.hpp"
#include "qseries/involution.hpp"
#include "qseries/serialize.hpp"
#include "qseries/usequence.hpp"
#include "qseries/version.hpp"

using nlohmann::json;
using namespace qseries;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verification = 1;
constexpr int exit_usage = 2;
constexpr int exit_precision = 3;

json report_envelope(const std::string& command, json parameters) {
    json j;
    j["engine"] = engine_version;
    j["command"] = command;
    j["parameters"] = std::move(parameters);
    return j;
}

std::optional<std::filesystem::path> cache_dir_from(const std::string& flag) {
    if (!flag.empty()) return std::filesystem::path(flag);
    if (const char* env = std::getenv("QS_CACHE_DIR"); env && *env)
        return std::filesystem::path(env);
    return std::nullopt;
}

Series cached_series(const std::optional<std::filesystem::path>& dir, const std::string& key,
                     const std::function<Series()>& compute) {
    if (dir) {
        if (const auto hit = cache_load(*dir, key)) {
            try {
                return deserialize_series(hit->payload);
            } catch (const std::exception&) {
                // corrupt payload: fall through and recompute
            }
        }
    }
    Series s = compute();
    if (dir) cache_store(*dir, CacheEntry{key, serialize_series(s)});
    return s;
}

json congruence_report_json(const CongruenceReport& report) {
    json j;
    j["theorem"] = report.family;
    j["n_max"] = report.n_max;
    json rows = json::array();
    for (const auto& row : report.rows) {
        json r;
        r["alpha"] = row.alpha;
        r["tested"] = row.tested;
        r["min_val3"] = row.min_val3 ? json(*row.min_val3) : json("inf");
        r["required"] = row.required;
        r["pass"] = row.pass;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    json viol = json::array();
    for (const auto& v : report.violations)
        viol.push_back(
            {{"n", v.n}, {"alpha", v.alpha}, {"required", v.required}, {"actual", v.actual}});
    j["violations"] = std::move(viol);
    j["pass"] = report.pass();
    return j;
}

json certificate_json(const Certificate& cert) {
    json j;
    j["level"] = cert.level;
    j["bound_q"] = cert.bound_q;
    j["verified"] = cert.verified;
    if (cert.mismatch_exponent) j["mismatch_x_exponent"] = *cert.mismatch_exponent;
    if (!cert.note.empty()) j["note"] = cert.note;
    json orders = json::array();
    for (const auto& row : cert.orders) {
        json r;
        r["cusp"] =
            std::to_string(row.cusp.numerator) + "/" + std::to_string(row.cusp.denominator);
        r["width"] = row.cusp.width;
        r["infinity"] = row.cusp.is_infinity;
        r["lhs_order"] = row.lhs_order.get_str();
        r["rhs_order"] = row.rhs_order.get_str();
        orders.push_back(std::move(r));
    }
    j["cusp_orders"] = std::move(orders);
    const auto invariance = [](const std::vector<InvarianceReport>& reports) {
        json arr = json::array();
        for (const auto& inv : reports)
            arr.push_back({{"weight", inv.weight.get_str()},
                           {"residue_delta", inv.residue_delta},
                           {"residue_n_over_delta", inv.residue_ndelta},
                           {"square_condition", inv.square_condition},
                           {"pass", inv.pass()}});
        return arr;
    };
    j["lhs_invariance"] = invariance(cert.lhs_invariance);
    j["rhs_invariance"] = invariance(cert.rhs_invariance);
    return j;
}

EtaExpression t_polynomial(const std::string& symbol) {
    const EtaQuotient t = named_constant(symbol).terms.at(0);
    EtaExpression e;
    e.terms.push_back(t.pow(-1));
    EtaQuotient c27;
    c27.scalar = 27;
    e.terms.push_back(c27);
    EtaQuotient t1 = t;
    t1.scalar = 3;
    e.terms.push_back(t1);
    EtaQuotient t2 = t.pow(2);
    t2.scalar = 9;
    e.terms.push_back(t2);
    return e;
}

/// (1 + base)^power expanded term by term.
EtaExpression binomial_power_expression(const EtaQuotient& base, int power) {
    EtaExpression e;
    for (int k = 0; k <= power; ++k) {
        EtaQuotient term = base.pow(k);
        long long c = 1;
        for (int i = 0; i < k; ++i) c = c * (power - i) / (i + 1);
        term.scalar *= static_cast<long>(c);
        e.terms.push_back(term);
    }
    return e;
}

struct Preset {
    std::string name;
    bool expect_refutation{false};
    std::function<Certificate()> run;
};

std::vector<Preset> certificate_presets() {
    std::vector<Preset> presets;
    presets.push_back(
        {"L0-t", false, [] { return certify_identity(named_constant("L0"), t_polynomial("t"), 24); }});
    presets.push_back({"jtp-theta-1-0", false, [] {
                           return certify_theta_identity(
                               {1, 0}, 1, EtaQuotient(1, 0, {{2, 5}, {1, -2}, {4, -2}}), 16);
                       }});
    presets.push_back({"jtp-theta-1-1", false, [] {
                           return certify_theta_identity({1, 1}, 1,
                                                         EtaQuotient(2, 0, {{4, 2}, {2, -1}}), 16);
                       }});
    presets.push_back({"jtp-theta-2-1", false, [] {
                           return certify_theta_identity({2, 1}, 1,
                                                         EtaQuotient(1, 0, {{2, 2}, {1, -1}}), 16);
                       }});
    presets.push_back({"p0-t", false, [] {
                           return certify_identity(
                               named_constant("p0"),
                               binomial_power_expression(named_constant("t").terms.at(0), 4), 24);
                       }});
    presets.push_back({"p1-t", false, [] {
                           return certify_identity(
                               named_constant("p1"),
                               binomial_power_expression(named_constant("t").terms.at(0), 2), 24);
                       }});
    presets.push_back({"p0tilde-t", false, [] {
                           return certify_identity(
                               named_constant("p0tilde"),
                               binomial_power_expression(named_constant("ttilde").terms.at(0), 4),
                               12);
                       }});
    presets.push_back({"p1tilde-t", false, [] {
                           return certify_identity(
                               named_constant("p1tilde"),
                               binomial_power_expression(named_constant("ttilde").terms.at(0), 2),
                               12);
                       }});
    presets.push_back({"Ltilde0-cpsi", false, [] {
                           EtaExpression rhs;
                           const EtaQuotient pre = named_constant("Ltilde0_prefactor").terms.at(0);
                           for (const auto& term : named_constant("cpsi60").terms)
                               rhs.terms.push_back(pre.times(term));
                           return certify_identity(t_polynomial("ttilde"), rhs, 24);
                       }});
    presets.push_back({"negative-control", true, [] {
                           EtaExpression bad = t_polynomial("t");
                           bad.terms.push_back(named_constant("t").terms.at(0).pow(5));
                           return certify_identity(named_constant("L0"), bad, 24);
                       }});
    return presets;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact q-series engine for 6-colored Frobenius partition congruences"};
    app.require_subcommand(1);

    std::string format = "json";
    std::string cache_flag;
    app.add_option("--format", format, "output format: json, csv, or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--cache-dir", cache_flag,
                   "cache directory (QS_CACHE_DIR is honored when unset)");

    auto* cmd_expand = app.add_subcommand("expand", "expand an eta expression to a q-series");
    std::string expand_expr, expand_symbol;
    long long expand_terms = 20;
    cmd_expand->add_option("--expr", expand_expr, "expression in the eta grammar");
    cmd_expand->add_option("--symbol", expand_symbol, "a registered symbol name");
    cmd_expand->add_option("--terms", expand_terms, "q-terms to expand")
        ->check(CLI::PositiveNumber);

    auto* cmd_coeffs = app.add_subcommand("coeffs", "tabulate cpsi60 and cphi6 coefficients");
    long long coeffs_nmax = 100;
    cmd_coeffs->add_option("--nmax", coeffs_nmax, "largest n")->check(CLI::PositiveNumber);

    auto* cmd_verify = app.add_subcommand("verify-congruence", "scan a congruence family");
    std::string verify_family = "1.2";
    long long verify_nmax = 2000;
    cmd_verify->add_option("--theorem", verify_family, "family: 1.1 (cphi6) or 1.2 (cpsi60)")
        ->check(CLI::IsMember({"1.1", "1.2"}));
    cmd_verify->add_option("--nmax", verify_nmax, "largest n")->check(CLI::PositiveNumber);

    auto* cmd_build =
        app.add_subcommand("build-l", "build a U-sequence chain and check 3-adic valuations");
    std::string build_side = "plain";
    int build_alpha_max = 4;
    long long build_terms = 20;
    cmd_build->add_option("--side", build_side, "plain or tilde")
        ->check(CLI::IsMember({"plain", "tilde"}));
    cmd_build->add_option("--alpha-max", build_alpha_max, "chain length")
        ->check(CLI::NonNegativeNumber);
    cmd_build->add_option("--terms", build_terms, "guaranteed q-terms at the top entry")
        ->check(CLI::PositiveNumber);

    auto* cmd_decompose = app.add_subcommand("decompose", "t-basis decomposition of a chain entry");
    std::string dec_side = "plain";
    int dec_alpha = 1;
    long long dec_terms = 60;
    cmd_decompose->add_option("--side", dec_side, "plain or tilde")
        ->check(CLI::IsMember({"plain", "tilde"}));
    cmd_decompose->add_option("--alpha", dec_alpha, "chain index")->check(CLI::NonNegativeNumber);
    cmd_decompose->add_option("--terms", dec_terms, "guaranteed q-terms for the entry")
        ->check(CLI::PositiveNumber);

    auto* cmd_transform = app.add_subcommand("transform", "chain-transform a symbol and calibrate");
    std::string tf_symbol;
    bool tf_all = false;
    long long tf_w = 4, tf_level = 36, tf_verify_to = 200;
    cmd_transform->add_option("--symbol", tf_symbol, "source symbol (A, B, t, y, p0, p1)");
    cmd_transform->add_flag("--all", tf_all, "run the whole transformation table");
    cmd_transform->add_option("--w", tf_w, "Atkin-Lehner index e");
    cmd_transform->add_option("--level", tf_level, "group level N");
    cmd_transform->add_option("--verify-to", tf_verify_to, "q-terms of series verification")
        ->check(CLI::PositiveNumber);

    auto* cmd_certify =
        app.add_subcommand("certify", "valence-formula certificate for an identity");
    std::string cert_lhs, cert_rhs, cert_preset;
    long long cert_level = 24;
    cmd_certify->add_option("--lhs", cert_lhs, "left side in the eta grammar");
    cmd_certify->add_option("--rhs", cert_rhs, "right side in the eta grammar");
    cmd_certify->add_option("--level", cert_level, "group level N");
    cmd_certify->add_option("--preset", cert_preset, "a named identity (see --list)");
    bool cert_list = false;
    cmd_certify->add_flag("--list", cert_list, "list preset names");

    auto* cmd_oracle = app.add_subcommand("oracle", "two-variable theta oracle triangulation");
    long long oracle_nmax = 60, oracle_j = 6;
    cmd_oracle->add_option("--nmax", oracle_nmax, "largest n to cross-check")
        ->check(CLI::PositiveNumber);
    cmd_oracle->add_option("--j", oracle_j, "zeta range")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    const auto cache_dir = cache_dir_from(cache_flag);

    try {
        if (cmd_expand->parsed()) {
            if (expand_expr.empty() == expand_symbol.empty()) {
                std::cerr << "expand needs exactly one of --expr or --symbol\n";
                return exit_usage;
            }
            const EtaExpression expr = expand_expr.empty() ? named_constant(expand_symbol)
                                                           : parse_eta_expression(expand_expr);
            const Series s = expand(expr, 24 * expand_terms);
            if (format == "text") {
                std::cout << "expression: " << format_eta_expression(expr) << "\n";
                std::cout << "series: " << s.to_string(static_cast<std::size_t>(expand_terms + 4))
                          << "\n";
                if (s.integer_q_support()) {
                    std::cout << "q-coefficients:";
                    bool first = true;
                    for (long long n = std::min<long long>(floor_div(s.offset(), 24), 0);
                         24 * n < s.trunc(); ++n) {
                        std::cout << (first ? " " : ", ") << s.at_q(n).get_str();
                        first = false;
                    }
                    std::cout << "\n";
                }
            } else {
                json j = report_envelope(
                    "expand", {{"expression", format_eta_expression(expr)}, {"terms", expand_terms}});
                j["series"] = series_to_json(s);
                std::cout << j.dump(2) << "\n";
            }
            return exit_ok;
        }

        if (cmd_coeffs->parsed()) {
            const Exponent24 T = 24 * (coeffs_nmax + 1);
            const Series psi = cached_series(cache_dir, "cpsi60:" + std::to_string(coeffs_nmax),
                                             [&] { return cpsi60_eta(T); });
            const Series phi = cached_series(cache_dir, "cphi6:" + std::to_string(coeffs_nmax),
                                             [&] { return cphi6_theta(T); });
            if (format == "csv") {
                std::cout << "n,cpsi60,cphi6,val3_cpsi60,val3_cphi6\n";
                for (long long n = 0; n <= coeffs_nmax; ++n) {
                    const auto v1 = val3(Int(psi.at_q(n).get_num()));
                    const auto v2 = val3(Int(phi.at_q(n).get_num()));
                    std::cout << n << "," << psi.at_q(n).get_str() << "," << phi.at_q(n).get_str()
                              << "," << (v1 ? std::to_string(*v1) : "inf") << ","
                              << (v2 ? std::to_string(*v2) : "inf") << "\n";
                }
            } else {
                json rows = json::array();
                for (long long n = 0; n <= coeffs_nmax; ++n) {
                    const auto v1 = val3(Int(psi.at_q(n).get_num()));
                    const auto v2 = val3(Int(phi.at_q(n).get_num()));
                    json r;
                    r["n"] = n;
                    r["cpsi60"] = psi.at_q(n).get_str();
                    r["cphi6"] = phi.at_q(n).get_str();
                    r["val3_cpsi60"] = v1 ? json(*v1) : json("inf");
                    r["val3_cphi6"] = v2 ? json(*v2) : json("inf");
                    rows.push_back(std::move(r));
                }
                json j = report_envelope("coeffs", {{"nmax", coeffs_nmax}});
                j["truncation_q"] = coeffs_nmax + 1;
                j["rows"] = std::move(rows);
                std::cout << j.dump(2) << "\n";
            }
            return exit_ok;
        }

        if (cmd_verify->parsed()) {
            const CongruenceReport report = verify_theorem(verify_family, verify_nmax);
            json j = report_envelope("verify-congruence",
                                     {{"theorem", verify_family}, {"nmax", verify_nmax}});
            j["truncation_q"] = verify_nmax + 1;
            j.update(congruence_report_json(report));
            std::cout << j.dump(2) << "\n";
            return report.pass() ? exit_ok : exit_verification;
        }

        if (cmd_build->parsed()) {
            const Side side = (build_side == "plain") ? Side::plain : Side::tilde;
            const LSequenceState state = build_L(side, build_alpha_max, build_terms);
            json j = report_envelope("build-l", {{"side", build_side},
                                                 {"alpha_max", build_alpha_max},
                                                 {"terms", build_terms}});
            j["complete"] = state.complete;
            if (!state.complete) j["stop_reason"] = state.stop_reason;
            bool all_pass = state.complete;
            json rows = json::array();
            for (const auto& row : check_divisibility(state)) {
                json r;
                r["alpha"] = row.alpha;
                r["q_precision"] = state.entries[static_cast<std::size_t>(row.alpha)].q_precision;
                r["min_val3"] = row.min_val3 ? json(*row.min_val3) : json("inf");
                if (row.required) r["required"] = *row.required;
                r["pass"] = row.pass;
                all_pass = all_pass && row.pass;
                rows.push_back(std::move(r));
            }
            j["rows"] = std::move(rows);
            j["pass"] = all_pass;
            std::cout << j.dump(2) << "\n";
            if (!state.complete) return exit_precision;
            return all_pass ? exit_ok : exit_verification;
        }

        if (cmd_decompose->parsed()) {
            const Side side = (dec_side == "plain") ? Side::plain : Side::tilde;
            const LSequenceState state = build_L(side, dec_alpha, dec_terms);
            if (!state.complete) {
                std::cerr << state.stop_reason << "\n";
                return exit_precision;
            }
            const bool tilde = side == Side::tilde;
            const Series& f = state.at(dec_alpha);
            const Exponent24 T = f.trunc();
            const Series t = expand(named_constant(tilde ? "ttilde" : "t"), T);
            const Series y = expand(named_constant(tilde ? "ytilde" : "y"), T);
            const Series one = Series::one(T);
            long long ypow = 0, n0 = -1;
            Series p = one;
            if (dec_alpha >= 1) {
                long long pw3 = 1;
                for (int i = 0; i <= dec_alpha; ++i) pw3 *= 3;
                if (dec_alpha % 2 == 1) {
                    p = expand(named_constant(tilde ? "p0tilde" : "p0"), T);
                    ypow = pw3 - 1;
                    n0 = -1;
                } else {
                    p = expand(named_constant(tilde ? "p1tilde" : "p1"), T);
                    ypow = pw3 - 3;
                    n0 = 0;
                }
            }
            const DecompositionResult dec = t_basis_decompose(f, p, y, ypow, t, n0);
            json j = report_envelope(
                "decompose", {{"side", dec_side}, {"alpha", dec_alpha}, {"terms", dec_terms}});
            j["truncation_q"] = floor_div(T, 24);
            j["n0"] = dec.n0;
            j["ypow"] = ypow;
            j["residual_ok"] = dec.residual_ok;
            j["extracted_upto"] = dec.extracted_upto;
            json ds = json::array();
            for (const auto& d : dec.d) ds.push_back(d.get_str());
            j["d"] = std::move(ds);
            std::cout << j.dump(2) << "\n";
            return dec.residual_ok ? exit_ok : exit_verification;
        }

        if (cmd_transform->parsed()) {
            if (tf_w != 4 || tf_level != 36) {
                std::cerr << "only the W_4 chain on level 36 is registered; the matrix "
                             "(28 3; 36 4) pins c*N = 36 and e = 4 must exactly divide N\n";
                return exit_usage;
            }
            if (tf_all || tf_symbol.empty()) {
                const TransformTableReport report = verify_transform_table(tf_verify_to);
                json j = report_envelope("transform", {{"all", true},
                                                       {"w", tf_w},
                                                       {"level", tf_level},
                                                       {"verify_to", tf_verify_to}});
                json rows = json::array();
                for (const auto& row : report.rows) {
                    json r;
                    r["symbol"] = row.symbol;
                    r["verified"] = row.verified;
                    r["scalar"] = row.scalar.get_str();
                    r["verified_to_q"] = floor_div(row.verified_to, 24);
                    if (!row.note.empty()) r["note"] = row.note;
                    rows.push_back(std::move(r));
                }
                j["rows"] = std::move(rows);
                j["matrix_check"] = report.matrix_check;
                j["gamma_check"] = report.gamma_check;
                j["level_map_notes"] = report.notes;
                j["all_verified"] = report.all_verified();
                std::cout << j.dump(2) << "\n";
                return report.all_verified() ? exit_ok : exit_verification;
            }
            const ALInvolution w = ALInvolution::w4();
            const std::map<std::string, std::string> images = {
                {"A", "Atilde"}, {"B", "Btilde"},   {"t", "ttilde"},
                {"y", "ytilde"}, {"p0", "p0tilde"}, {"p1", "p1tilde"}};
            const auto it = images.find(tf_symbol);
            if (it == images.end()) {
                std::cerr << "unknown transform symbol: " << tf_symbol << "\n";
                return exit_usage;
            }
            const EtaQuotient image = chain_transform(named_constant(tf_symbol).terms.at(0), w);
            const CalibratedQuotient cal =
                calibrate(image, named_constant(it->second).terms.at(0), 24 * tf_verify_to);
            json j = report_envelope("transform", {{"symbol", tf_symbol},
                                                   {"w", tf_w},
                                                   {"level", tf_level},
                                                   {"verify_to", tf_verify_to}});
            j["image"] = format_eta_quotient(cal.quotient);
            j["scalar"] = cal.quotient.scalar.get_str();
            j["verified_to_q"] = floor_div(cal.verified_to, 24);
            std::cout << j.dump(2) << "\n";
            return exit_ok;
        }

        if (cmd_certify->parsed()) {
            const auto presets = certificate_presets();
            if (cert_list) {
                json names = json::array();
                for (const auto& p : presets) names.push_back(p.name);
                std::cout << names.dump(2) << "\n";
                return exit_ok;
            }
            Certificate cert;
            bool expect_refutation = false;
            json params;
            if (!cert_preset.empty()) {
                const auto it = std::find_if(presets.begin(), presets.end(),
                                             [&](const Preset& p) { return p.name == cert_preset; });
                if (it == presets.end()) {
                    std::cerr << "unknown preset: " << cert_preset << " (try --list)\n";
                    return exit_usage;
                }
                cert = it->run();
                expect_refutation = it->expect_refutation;
                params = {{"preset", cert_preset}};
            } else {
                if (cert_lhs.empty() || cert_rhs.empty()) {
                    std::cerr << "certify needs --preset or both --lhs and --rhs\n";
                    return exit_usage;
                }
                cert = certify_identity(parse_eta_expression(cert_lhs),
                                        parse_eta_expression(cert_rhs), cert_level);
                params = {{"lhs", cert_lhs}, {"rhs", cert_rhs}, {"level", cert_level}};
            }
            json j = report_envelope("certify", params);
            j.update(certificate_json(cert));
            if (expect_refutation) {
                j["expected"] = "refutation";
                j["pass"] = !cert.verified;
                std::cout << j.dump(2) << "\n";
                return cert.verified ? exit_verification : exit_ok;
            }
            std::cout << j.dump(2) << "\n";
            return cert.verified ? exit_ok : exit_verification;
        }

        if (cmd_oracle->parsed()) {
            const Exponent24 T = 24 * (oracle_nmax + 1);
            const ZetaLaurentSeries oracle = f6_zeta_oracle(T, oracle_j);
            const Series phi = cphi6_theta(T);
            const Series psi = cpsi60_eta(T);
            bool ok = true;
            for (long long n = 0; n <= oracle_nmax && ok; ++n)
                ok = oracle.slice(3).at_q(n) == phi.at_q(n) &&
                     oracle.slice(0).at_q(n) == psi.at_q(n);
            json j = report_envelope("oracle", {{"nmax", oracle_nmax}, {"j", oracle_j}});
            j["checked_terms"] = oracle_nmax + 1;
            j["pass"] = ok;
            std::cout << j.dump(2) << "\n";
            return ok ? exit_ok : exit_verification;
        }
    } catch (const precision_error& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return exit_precision;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_verification;
    }

    std::cerr << "no subcommand selected\n";
    return exit_usage;
}
