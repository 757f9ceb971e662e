// rtstat command-line front end: reproducible return-time experiments,
// digit-file analysis, and the numeric oracle reports. Every run writes a
// manifest.json capturing the parameters, seeds and input digests needed to
// reproduce its outputs byte for byte.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtstat/rtstat.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rtstat::FileError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(data));
    return std::string("fnv1a64:") + buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

/// Collects files written by one run so a failure can remove partial output.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw rtstat::FileError("cannot write " + p.string());
        created_.push_back(p);
        return out;
    }

    void write_json(const std::string& name, const json& j) {
        auto out = open(name);
        out << j.dump(2) << "\n";
    }

    void discard_all() {
        for (const auto& p : created_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& p : created_) out.push_back(p.filename().string());
        return out;
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<fs::path> created_;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("RTSTAT_OUT_DIR")) return env;
    return ".";
}

json manifest_skeleton(const std::string& subcommand) {
    json m;
    m["tool"] = "rtstat";
    m["version"] = rtstat::kVersion;
    m["subcommand"] = subcommand;
    m["created_utc"] = utc_timestamp();
    return m;
}

rtstat::ProcessModel model_from_flags(std::uint32_t alphabet, const std::string& probs_csv,
                                      bool renormalize = false) {
    if (probs_csv.empty()) return rtstat::ProcessModel::equidistributed(alphabet);
    std::vector<double> probs;
    std::size_t pos = 0;
    while (pos <= probs_csv.size()) {
        const std::size_t comma = probs_csv.find(',', pos);
        const std::string tok =
            probs_csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty()) throw rtstat::DomainError("empty probability in --probs");
        probs.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (probs.size() != alphabet)
        throw rtstat::DomainError("--probs lists " + std::to_string(probs.size()) +
                                  " values for alphabet size " + std::to_string(alphabet));
    if (renormalize) {
        double sum = 0.0;
        for (double q : probs) sum += q;
        if (!(sum > 0.0)) throw rtstat::DomainError("--probs must have positive mass");
        for (double& q : probs) q /= sum;
    }
    return rtstat::ProcessModel::with_probs(probs, 1e-9);
}

json qq_to_json(const rtstat::QQData& qq) {
    json j;
    j["slope"] = qq.slope;
    j["intercept"] = qq.intercept;
    json pts = json::array();
    for (const auto& [t, s] : qq.points) pts.push_back({t, s});
    j["points"] = std::move(pts);
    return j;
}

double sample_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::uint32_t alphabet = 2;
    std::string probs;
    std::size_t k = 250;
    std::size_t ell = 10;
    std::size_t trials = 500;
    std::uint64_t seed = 0;
    std::string correction = "off";
    bool renormalize = false;
    std::string out_dir = default_out_dir();
};

int run_simulate(const SimulateArgs& a) {
    const auto model = model_from_flags(a.alphabet, a.probs, a.renormalize);
    rtstat::TrialConfig cfg;
    cfg.model = model;
    cfg.k = a.k;
    cfg.ell = a.ell;
    cfg.trials = a.trials;
    cfg.master_seed = a.seed;
    cfg.correction = a.correction == "on";

    OutputSet out(a.out_dir);
    try {
        rtstat::TrialRun run = rtstat::run_trials(cfg);
        const std::vector<double>& z_report = cfg.correction ? run.z_corrected : run.z;

        {
            auto csv = out.open("trials.csv");
            csv << "trial,z,h_hat\n";
            for (const auto& o : run.outcomes) {
                if (o.censored) {
                    csv << o.trial << ",nan,nan\n";
                    std::cerr << "trial " << o.trial << ": " << o.censored_indices
                              << " return times censored\n";
                } else {
                    csv << o.trial << "," << format_double(cfg.correction ? o.z_corrected : o.z)
                        << "," << format_double(o.h_hat) << "\n";
                }
            }
        }

        json summary;
        rtstat::QQData qq;
        if (z_report.size() >= 3) {
            qq = rtstat::qq_points(z_report);
            auto csv = out.open("qq.csv");
            csv << "theoretical,sample\n";
            for (const auto& [t, s] : qq.points)
                csv << format_double(t) << "," << format_double(s) << "\n";
        }

        summary["trials"] = a.trials;
        summary["censored_trials"] = run.censored_trials;
        summary["correction"] = a.correction;
        summary["entropy_bits"] = model.entropy_bits();
        if (!z_report.empty()) {
            summary["mean_z"] = sample_mean(z_report);
            if (z_report.size() >= 2) summary["variance_z"] = sample_variance(z_report);
            summary["mean_h_hat"] = sample_mean(run.h_hat);
        }
        if (z_report.size() >= 20) {
            const auto ks = rtstat::ks_normal(z_report);
            summary["ks_d"] = ks.d;
            summary["ks_p"] = ks.approx_p;
        }
        const auto regime = rtstat::regime_check(a.k, a.ell, model);
        summary["regime"] = {{"strict_product", regime.strict_product},
                             {"equidistributed_product", regime.equidistributed_product},
                             {"weak_product", regime.weak_product},
                             {"strict_ok", regime.strict_ok},
                             {"equidistributed_ok", regime.equidistributed_ok},
                             {"weak_ok", regime.weak_ok}};
        summary["initial_post_blocks"] = run.initial_post_blocks;
        summary["cap_post_blocks"] = run.cap_post_blocks;
        out.write_json("summary.json", summary);

        json manifest = manifest_skeleton("simulate");
        manifest["parameters"] = {{"alphabet", a.alphabet}, {"probs", a.probs},
                                  {"k", a.k},               {"ell", a.ell},
                                  {"trials", a.trials},     {"correction", a.correction}};
        manifest["seeds"] = {{"master_seed", a.seed}};
        manifest["input_digests"] = json::object();
        manifest["outputs"] = out.names();
        out.write_json("manifest.json", manifest);

        return run.censored_trials == 0 ? 0 : 2;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string file;
    std::uint32_t alphabet = 10;
    std::size_t k = 1000;
    std::size_t ell = 4;
    std::size_t segment_length = 400000;
    std::string out_dir = default_out_dir();
};

int run_analyze(const AnalyzeArgs& a) {
    if (a.alphabet != 2 && a.alphabet != 10)
        throw rtstat::DomainError("--alphabet must be 2 (binary) or 10 (decimal)");

    rtstat::DigitFileSpec spec;
    spec.path = a.file;
    spec.alphabet_size = a.alphabet;
    const auto parsed = rtstat::parse_digit_file(spec);
    const auto seg = rtstat::segment(parsed.seq, a.segment_length);
    const double h_bits = std::log2(static_cast<double>(a.alphabet));

    OutputSet out(a.out_dir);
    try {
        std::vector<double> z_values;
        std::size_t bad_segments = 0;
        {
            auto csv = out.open("segments.csv");
            csv << "segment,z,h_hat\n";
            for (std::size_t i = 0; i < seg.segments.size(); ++i) {
                const auto& s = seg.segments[i];
                if (s.size() < a.k * a.ell) {
                    ++bad_segments;
                    csv << i << ",nan,nan\n";
                    std::cerr << "segment " << i << ": too short for k*ell\n";
                    continue;
                }
                const auto blocks = rtstat::blockify(s, a.ell);
                const auto rt = rtstat::return_times(blocks, a.k, blocks.block_count());
                if (!rt.all_uncensored()) {
                    ++bad_segments;
                    csv << i << ",nan,nan\n";
                    std::cerr << "segment " << i << ": " << rt.censored_indices().size()
                              << " return times censored\n";
                    continue;
                }
                const double z = rtstat::clt_statistic(rt, a.ell, h_bits);
                const double hh = rtstat::entropy_estimate(rt, a.ell);
                z_values.push_back(z);
                csv << i << "," << format_double(z) << "," << format_double(hh) << "\n";
            }
        }

        json summary;
        summary["file"] = a.file;
        summary["symbols"] = parsed.seq.size();
        summary["segments"] = seg.segments.size();
        summary["segments_with_errors"] = bad_segments;
        summary["discarded_symbols"] = seg.discarded;
        summary["entropy_bits_null"] = h_bits;
        if (!z_values.empty()) {
            summary["mean_z"] = sample_mean(z_values);
            if (z_values.size() >= 2) summary["variance_z"] = sample_variance(z_values);
        }
        if (z_values.size() >= 20) {
            const auto ks = rtstat::ks_normal(z_values);
            summary["ks_d"] = ks.d;
            summary["ks_p"] = ks.approx_p;
        }
        if (z_values.size() >= 3) summary["qq"] = qq_to_json(rtstat::qq_points(z_values));
        out.write_json("summary.json", summary);

        json manifest = manifest_skeleton("analyze");
        manifest["parameters"] = {{"file", a.file},
                                  {"alphabet", a.alphabet},
                                  {"k", a.k},
                                  {"ell", a.ell},
                                  {"segment_length", a.segment_length}};
        manifest["seeds"] = json::object();
        manifest["input_digests"] = {{a.file, fnv1a64_file(a.file)}};
        manifest["outputs"] = out.names();
        out.write_json("manifest.json", manifest);

        return bad_segments == 0 ? 0 : 2;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

// ---------------------------------------------------------------------------
// moments / na-check / baseline
// ---------------------------------------------------------------------------

struct MomentsArgs {
    double p = 0.5;
    double tol = 1e-10;
    std::string out_dir = default_out_dir();
};

int run_moments(const MomentsArgs& a) {
    const auto rep = rtstat::moment_report(rtstat::GeomParam(a.p), a.tol);
    json j;
    j["p"] = rep.p;
    j["mu_exact"] = rep.mu_exact;
    j["mu_asym"] = rep.mu_asym;
    j["sigma2_exact"] = rep.sigma2_exact;
    j["sigma2_asym"] = rep.sigma2_asym;
    j["third_central_abs"] = rep.third_central_abs;
    j["tail_truncation_error_bound"] = rep.tail_truncation_error_bound;
    j["inverse_moment_1"] = rtstat::inverse_moment(rtstat::GeomParam(a.p), 1);
    j["inverse_moment_2"] = rtstat::inverse_moment(rtstat::GeomParam(a.p), 2, a.tol);

    OutputSet out(a.out_dir);
    out.write_json("moments.json", j);
    json manifest = manifest_skeleton("moments");
    manifest["parameters"] = {{"p", a.p}, {"tol", a.tol}};
    manifest["seeds"] = json::object();
    manifest["input_digests"] = json::object();
    manifest["outputs"] = out.names();
    out.write_json("manifest.json", manifest);
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct NaCheckArgs {
    double p = 0.00390625;
    std::size_t k = 4;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::string out_dir = default_out_dir();
};

int run_na_check(const NaCheckArgs& a) {
    using rtstat::MonotoneSpec;
    if (static_cast<double>(a.k) * a.p >= 1.0)
        throw rtstat::DomainError("need k * p < 1 for the spacings sampler");

    std::vector<std::vector<std::uint64_t>> rows;
    rows.reserve(a.samples);
    for (std::size_t i = 0; i < a.samples; ++i)
        rows.push_back(rtstat::ordered_spacings_sample(a.k, a.p, rtstat::derive_seed(a.seed, i)));

    const double t = 1.0 / a.p;  // roughly the marginal median scale
    struct NamedPair {
        const char* name;
        MonotoneSpec f1, f2;
    };
    std::vector<NamedPair> pairs;
    if (a.k >= 2) {
        pairs.push_back({"sum0_vs_sum1",
                         {MonotoneSpec::Kind::CoordinateSum, {0}, 0.0},
                         {MonotoneSpec::Kind::CoordinateSum, {1}, 0.0}});
    }
    if (a.k >= 4) {
        pairs.push_back({"max01_vs_indicator2",
                         {MonotoneSpec::Kind::CoordinateMax, {0, 1}, 0.0},
                         {MonotoneSpec::Kind::IndicatorMaxExceeds, {2}, t}});
        pairs.push_back({"sum01_vs_sum23",
                         {MonotoneSpec::Kind::CoordinateSum, {0, 1}, 0.0},
                         {MonotoneSpec::Kind::CoordinateSum, {2, 3}, 0.0}});
        pairs.push_back({"max0_vs_max3",
                         {MonotoneSpec::Kind::CoordinateMax, {0}, 0.0},
                         {MonotoneSpec::Kind::CoordinateMax, {3}, 0.0}});
        pairs.push_back({"indicator0_vs_indicator3",
                         {MonotoneSpec::Kind::IndicatorMaxExceeds, {0}, t},
                         {MonotoneSpec::Kind::IndicatorMaxExceeds, {3}, t}});
    }

    json j;
    j["p"] = a.p;
    j["k"] = a.k;
    j["samples"] = a.samples;
    if (a.p <= 0.25) {
        const double cov = rtstat::exact_pair_log_covariance(a.p, 1e-9);
        j["exact_pair_log_covariance"] = cov;
        j["heuristic_p_ln_p_over_4"] = a.p * std::log(a.p) / 4.0;
        j["covariance_tolerance"] = 1e-9;
    }
    json checks = json::array();
    for (const auto& pr : pairs) {
        const auto res = rtstat::na_empirical_check(rows, pr.f1, pr.f2);
        checks.push_back({{"pair", pr.name},
                          {"covariance", res.covariance},
                          {"std_error", res.std_error},
                          {"within_na_bound", res.covariance <= 3.0 * res.std_error}});
    }
    j["monotone_pairs"] = std::move(checks);

    OutputSet out(a.out_dir);
    out.write_json("na_check.json", j);
    json manifest = manifest_skeleton("na-check");
    manifest["parameters"] = {{"p", a.p}, {"k", a.k}, {"samples", a.samples}};
    manifest["seeds"] = {{"seed", a.seed}};
    manifest["input_digests"] = json::object();
    manifest["outputs"] = out.names();
    out.write_json("manifest.json", manifest);
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct BaselineArgs {
    std::string mode = "grassberger";
    std::size_t n = 4096;
    std::uint32_t alphabet = 2;
    std::string probs;
    std::uint64_t seed = 7;
    std::size_t count = 1;
    bool renormalize = false;
    std::string out_dir = default_out_dir();
};

int run_baseline(const BaselineArgs& a) {
    const auto model = model_from_flags(a.alphabet, a.probs, a.renormalize);
    OutputSet out(a.out_dir);
    int rc = 0;
    try {
        auto csv = out.open("baseline.csv");
        if (a.mode == "grassberger") {
            csv << "index,entropy_bits\n";
            for (std::size_t i = 0; i < a.count; ++i) {
                std::size_t extension = 256;
                double est = 0.0;
                for (;;) {
                    const auto seq =
                        rtstat::gen_iid(model, a.n + extension, rtstat::derive_seed(a.seed, i));
                    try {
                        est = rtstat::grassberger_entropy(seq, a.n);
                        break;
                    } catch (const rtstat::UnresolvedError&) {
                        if (extension >= 65536) throw;
                        extension *= 2;
                    }
                }
                csv << i << "," << format_double(est) << "\n";
                std::cout << i << "," << format_double(est) << "\n";
            }
        } else if (a.mode == "wyner") {
            csv << "index,z\n";
            for (std::size_t i = 0; i < a.count; ++i) {
                std::size_t len = std::max<std::size_t>(4 * a.n, 1u << 17);
                for (;;) {
                    const auto seq = rtstat::gen_iid(model, len, rtstat::derive_seed(a.seed, i));
                    try {
                        const double z = rtstat::wyner_statistic(seq, a.n, model);
                        csv << i << "," << format_double(z) << "\n";
                        std::cout << i << "," << format_double(z) << "\n";
                        break;
                    } catch (const rtstat::CensoredDataError&) {
                        if (len >= (std::size_t{1} << 24)) {
                            csv << i << ",nan\n";
                            std::cerr << "sequence " << i << ": prefix did not recur within "
                                      << len << " symbols\n";
                            rc = 2;
                            break;
                        }
                        len *= 2;
                    }
                }
            }
        } else if (a.mode == "overlap") {
            csv << "index,t\n";
            for (std::size_t i = 0; i < a.count; ++i) {
                const std::size_t len = std::max<std::size_t>(4 * a.n, 1u << 17);
                const auto seq = rtstat::gen_iid(model, len, rtstat::derive_seed(a.seed, i));
                const auto t = rtstat::overlapping_return_time(seq, a.n, len);
                if (t.censored) {
                    csv << i << ",nan\n";
                    rc = 2;
                } else {
                    csv << i << "," << t.value << "\n";
                    std::cout << i << "," << t.value << "\n";
                }
            }
        } else {
            throw rtstat::DomainError("--mode must be grassberger, wyner or overlap");
        }

        json manifest = manifest_skeleton("baseline");
        manifest["parameters"] = {{"mode", a.mode},         {"n", a.n},
                                  {"alphabet", a.alphabet}, {"probs", a.probs},
                                  {"count", a.count}};
        manifest["seeds"] = {{"seed", a.seed}};
        manifest["input_digests"] = json::object();
        manifest["outputs"] = out.names();
        out.write_json("manifest.json", manifest);
        return rc;
    } catch (...) {
        out.discard_all();
        throw;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"return-time statistics: simulation, digit-file analysis and oracles"};
    app.set_version_flag("--version", rtstat::kVersion);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo trials of the z statistic");
    c_sim->add_option("--alphabet", sim.alphabet, "alphabet size")->required();
    c_sim->add_option("--probs", sim.probs, "comma-separated symbol probabilities");
    c_sim->add_option("--k", sim.k, "number of source blocks")->required();
    c_sim->add_option("--ell", sim.ell, "block length")->required();
    c_sim->add_option("--trials", sim.trials, "number of trials");
    c_sim->add_option("--seed", sim.seed, "master seed");
    c_sim->add_option("--correction", sim.correction, "variance correction: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    c_sim->add_flag("--renormalize", sim.renormalize,
                    "rescale --probs to sum to 1 (off: sums must match to 1e-9)");
    c_sim->add_option("--out-dir", sim.out_dir, "output directory");

    AnalyzeArgs ana;
    auto* c_ana = app.add_subcommand("analyze", "per-segment z statistics of a digit file");
    c_ana->add_option("--file", ana.file, "digit file")->required();
    c_ana->add_option("--alphabet", ana.alphabet, "2 or 10");
    c_ana->add_option("--k", ana.k, "number of source blocks per segment");
    c_ana->add_option("--ell", ana.ell, "block length");
    c_ana->add_option("--segment-length", ana.segment_length, "digits per segment");
    c_ana->add_option("--out-dir", ana.out_dir, "output directory");

    MomentsArgs mom;
    auto* c_mom = app.add_subcommand("moments", "exact geometric log-moment report");
    c_mom->add_option("--p", mom.p, "geometric parameter in (0,1)")->required();
    c_mom->add_option("--tol", mom.tol, "series tolerance");
    c_mom->add_option("--out-dir", mom.out_dir, "output directory");

    NaCheckArgs nac;
    auto* c_nac = app.add_subcommand("na-check", "negative-association and covariance oracles");
    c_nac->add_option("--p", nac.p, "per-block probability")->required();
    c_nac->add_option("--k", nac.k, "vector length");
    c_nac->add_option("--samples", nac.samples, "Monte Carlo samples");
    c_nac->add_option("--seed", nac.seed, "seed");
    c_nac->add_option("--out-dir", nac.out_dir, "output directory");

    BaselineArgs bas;
    auto* c_bas = app.add_subcommand("baseline", "comparator estimators");
    c_bas->add_option("--mode", bas.mode, "grassberger|wyner|overlap");
    c_bas->add_option("--n", bas.n, "prefix length / position count");
    c_bas->add_option("--alphabet", bas.alphabet, "alphabet size");
    c_bas->add_option("--probs", bas.probs, "comma-separated symbol probabilities");
    c_bas->add_option("--seed", bas.seed, "seed");
    c_bas->add_option("--count", bas.count, "number of sequences");
    c_bas->add_flag("--renormalize", bas.renormalize,
                    "rescale --probs to sum to 1 (off: sums must match to 1e-9)");
    c_bas->add_option("--out-dir", bas.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_ana->parsed()) return run_analyze(ana);
        if (c_mom->parsed()) return run_moments(mom);
        if (c_nac->parsed()) return run_na_check(nac);
        if (c_bas->parsed()) return run_baseline(bas);
    } catch (const rtstat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
