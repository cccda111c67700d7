// Command-line front end: builds measurement polyhedra and Werner targets,
// runs/resumes the distance-to-polytope iteration, certifies decompositions in
// exact arithmetic, reports visibility/Grothendieck bounds, and decomposes
// noisy POVMs into projective measurements.

#include "CLI11.hpp"

#include "lhv/bloch.hpp"
#include "lhv/certify.hpp"
#include "lhv/errors.hpp"
#include "lhv/gilbert.hpp"
#include "lhv/povm.hpp"
#include "lhv/rng.hpp"
#include "lhv/version.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIterationBudget = 2;
constexpr int kExitIncomplete = 3;
constexpr int kExitCertFailure = 4;

unsigned default_precision_bits() {
    if (const char* env = std::getenv("LHV_PRECISION_BITS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 64 && v <= (1ul << 20)) return static_cast<unsigned>(v);
        std::cerr << "warning: ignoring invalid LHV_PRECISION_BITS='" << env << "'\n";
    }
    return 256;
}

void print_config(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::cout << "config tool_version=" << lhv::kToolVersion << "\n";
    for (const auto& [k, v] : kv) std::cout << "config " << k << "=" << v << "\n";
}

double rational_or_decimal(const std::string& s) {
    if (s.find('/') != std::string::npos) {
        lhv::Rational r = lhv::parse_rational(s);
        return r.get_d();
    }
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw lhv::ParseError("trailing characters in number '" + s + "'");
        return v;
    } catch (const lhv::ParseError&) {
        throw;
    } catch (...) {
        throw lhv::ParseError("cannot parse number '" + s + "'");
    }
}

// Advisory lock guarding a checkpoint path against concurrent runs.
class CheckpointLock {
public:
    explicit CheckpointLock(const std::string& checkpoint_path) {
        path_ = checkpoint_path + ".lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw lhv::IoError("cannot open lock file: " + path_);
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw lhv::IoError("checkpoint is locked by another run: " + path_);
        }
    }
    ~CheckpointLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    std::string path_;
    int fd_ = -1;
};

struct RunFlags {
    int n = 3;
    std::string v0 = "1/2";
    double eps = 1e-5;
    uint64_t max_iters = 1000000;
    uint64_t checkpoint_every = 100000;
    uint64_t seed = 1;
    int restarts = 100;
    std::string oracle = "heuristic";
    std::string checkpoint;
    uint64_t log_every = 100000;
};

lhv::OracleFn make_oracle(const RunFlags& flags) {
    if (flags.oracle == "exact") {
        return [](const lhv::CorrelationMatrix& G, uint64_t) { return lhv::exact_oracle(G); };
    }
    if (flags.oracle != "heuristic") throw lhv::InvalidParameterError("oracle must be heuristic or exact");
    int restarts = flags.restarts;
    uint64_t seed = flags.seed;
    return [restarts, seed](const lhv::CorrelationMatrix& G, uint64_t iteration) {
        return lhv::heuristic_oracle(G, restarts, lhv::derive_seed(seed, iteration));
    };
}

int drive_run(lhv::GilbertState& state, const RunFlags& flags) {
    CheckpointLock lock(flags.checkpoint);
    lhv::OracleFn oracle = make_oracle(flags);

    lhv::RunOptions opts;
    opts.eps = flags.eps;
    opts.max_iters = flags.max_iters;
    opts.checkpoint_every = flags.checkpoint_every;
    opts.checkpoint_path = flags.checkpoint;
    uint64_t log_every = flags.log_every;
    uint64_t seed = flags.seed;
    opts.on_iteration = [log_every, seed](const lhv::GilbertState& st) {
        if (log_every > 0 && st.iteration % log_every == 0) {
            std::printf("iter=%llu distance=%.9e decomposition_size=%zu oracle_seed=%llu\n",
                        static_cast<unsigned long long>(st.iteration), st.distance,
                        st.strategies.size(),
                        static_cast<unsigned long long>(lhv::derive_seed(seed, st.iteration)));
            std::fflush(stdout);
        }
    };

    lhv::RunOutcome outcome = lhv::gilbert_run(state, opts, oracle);
    lhv::save_checkpoint(state, flags.checkpoint);
    std::printf("final iter=%llu distance=%.9e decomposition_size=%zu renormalizations=%llu\n",
                static_cast<unsigned long long>(state.iteration), state.distance,
                state.strategies.size(), static_cast<unsigned long long>(state.renorm_count));
    if (outcome == lhv::RunOutcome::Converged) {
        std::printf("converged: distance <= %.3e\n", flags.eps);
        return kExitOk;
    }
    std::printf("iteration budget reached before eps\n");
    return kExitIterationBudget;
}

std::string interval_str(const lhv::Interval& iv) {
    return "[" + iv.lower_string(25) + ", " + iv.upper_string(25) + "]";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"local-hidden-variable models for two-qubit Werner states"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ---- polyhedron ----
    auto* cmd_poly = app.add_subcommand("polyhedron", "build a measurement polyhedron and export it");
    {
        auto n = std::make_shared<int>(3);
        auto out = std::make_shared<std::string>("polyhedron.txt");
        cmd_poly->add_option("--n", *n, "polyhedron parameter (>= 2)")->required();
        cmd_poly->add_option("--out", *out, "output path");
        cmd_poly->callback([n, out, &action]() {
            action = [n, out]() {
                print_config({{"command", "polyhedron"}, {"n", std::to_string(*n)}, {"out", *out}});
                lhv::MeasurementPolyhedron poly = lhv::build_polyhedron(*n);
                lhv::write_polyhedron(poly, *out);
                std::printf("n=%d m=%d eta=%s\n", poly.n, poly.m, interval_str(poly.eta).c_str());
                return kExitOk;
            };
        });
    }

    // ---- target ----
    auto* cmd_target = app.add_subcommand("target", "write the Werner correlation target as CSV");
    {
        auto n = std::make_shared<int>(3);
        auto v = std::make_shared<std::string>("1/2");
        auto out = std::make_shared<std::string>("target.csv");
        cmd_target->add_option("--n", *n, "polyhedron parameter")->required();
        cmd_target->add_option("--v", *v, "visibility (rational like 689/1000 or decimal)")->required();
        cmd_target->add_option("--out", *out, "output path");
        cmd_target->callback([n, v, out, &action]() {
            action = [n, v, out]() {
                print_config({{"command", "target"}, {"n", std::to_string(*n)}, {"v", *v}, {"out", *out}});
                lhv::MeasurementPolyhedron poly = lhv::build_polyhedron(*n);
                lhv::CorrelationMatrix q = lhv::werner_target(poly, rational_or_decimal(*v));
                lhv::write_correlation_csv(q, *out);
                std::printf("m=%d written to %s\n", q.m, out->c_str());
                return kExitOk;
            };
        });
    }

    // ---- run ----
    auto* cmd_run = app.add_subcommand("run", "run the distance-to-polytope iteration");
    {
        auto flags = std::make_shared<RunFlags>();
        cmd_run->add_option("--n", flags->n, "polyhedron parameter")->required();
        cmd_run->add_option("--v0", flags->v0, "initial visibility as an exact rational num/den")->required();
        cmd_run->add_option("--eps", flags->eps, "target distance");
        cmd_run->add_option("--max-iters", flags->max_iters, "iteration budget");
        cmd_run->add_option("--checkpoint-every", flags->checkpoint_every, "checkpoint cadence");
        cmd_run->add_option("--seed", flags->seed, "base seed; all randomness derives from it");
        cmd_run->add_option("--restarts", flags->restarts, "heuristic oracle restarts");
        cmd_run->add_option("--oracle", flags->oracle, "oracle kind: heuristic|exact")
            ->check(CLI::IsMember({"heuristic", "exact"}));
        cmd_run->add_option("--checkpoint", flags->checkpoint, "checkpoint path")->required();
        cmd_run->add_option("--log-every", flags->log_every, "progress print cadence");
        cmd_run->callback([flags, &action]() {
            action = [flags]() {
                lhv::Rational v0 = lhv::parse_rational(flags->v0);
                if (v0 < 0 || v0 > 1) throw lhv::InvalidParameterError("v0 must be in [0, 1]");
                print_config({{"command", "run"},
                              {"n", std::to_string(flags->n)},
                              {"v0", lhv::rational_to_string(v0)},
                              {"eps", std::to_string(flags->eps)},
                              {"max_iters", std::to_string(flags->max_iters)},
                              {"checkpoint_every", std::to_string(flags->checkpoint_every)},
                              {"seed", std::to_string(flags->seed)},
                              {"restarts", std::to_string(flags->restarts)},
                              {"oracle", flags->oracle},
                              {"oracle_init", "iid uniform +-1"},
                              {"oracle_seed_rule", "splitmix64(seed, iteration); restart r adds r"},
                              {"checkpoint", flags->checkpoint}});
                lhv::MeasurementPolyhedron poly = lhv::build_polyhedron(flags->n);
                lhv::CorrelationMatrix target = lhv::werner_target(poly, v0.get_d());
                lhv::GilbertState state = lhv::gilbert_init(target, flags->seed);
                return drive_run(state, *flags);
            };
        });
    }

    // ---- resume ----
    auto* cmd_resume = app.add_subcommand("resume", "resume a checkpointed run");
    {
        auto flags = std::make_shared<RunFlags>();
        cmd_resume->add_option("--n", flags->n, "polyhedron parameter (to rebuild the target)")->required();
        cmd_resume->add_option("--v0", flags->v0, "initial visibility rational")->required();
        cmd_resume->add_option("--eps", flags->eps, "target distance");
        cmd_resume->add_option("--max-iters", flags->max_iters, "iteration budget");
        cmd_resume->add_option("--checkpoint-every", flags->checkpoint_every, "checkpoint cadence");
        cmd_resume->add_option("--restarts", flags->restarts, "heuristic oracle restarts");
        cmd_resume->add_option("--oracle", flags->oracle, "oracle kind: heuristic|exact")
            ->check(CLI::IsMember({"heuristic", "exact"}));
        cmd_resume->add_option("--checkpoint", flags->checkpoint, "checkpoint path")->required();
        cmd_resume->add_option("--log-every", flags->log_every, "progress print cadence");
        cmd_resume->callback([flags, &action]() {
            action = [flags]() {
                lhv::Rational v0 = lhv::parse_rational(flags->v0);
                if (v0 < 0 || v0 > 1) throw lhv::InvalidParameterError("v0 must be in [0, 1]");
                lhv::MeasurementPolyhedron poly = lhv::build_polyhedron(flags->n);
                lhv::CorrelationMatrix target = lhv::werner_target(poly, v0.get_d());
                lhv::GilbertState state = lhv::load_checkpoint(flags->checkpoint, target);
                flags->seed = state.seed; // randomness continues from the stored stream
                print_config({{"command", "resume"},
                              {"n", std::to_string(flags->n)},
                              {"v0", lhv::rational_to_string(v0)},
                              {"eps", std::to_string(flags->eps)},
                              {"max_iters", std::to_string(flags->max_iters)},
                              {"seed", std::to_string(state.seed)},
                              {"restarts", std::to_string(flags->restarts)},
                              {"oracle", flags->oracle},
                              {"resume_iteration", std::to_string(state.iteration)},
                              {"checkpoint", flags->checkpoint}});
                return drive_run(state, *flags);
            };
        });
    }

    // ---- certify ----
    auto* cmd_certify = app.add_subcommand("certify", "turn a checkpointed decomposition into an exact certificate");
    {
        auto n = std::make_shared<int>(3);
        auto v0s = std::make_shared<std::string>();
        auto nus = std::make_shared<std::string>("999/1000");
        auto k = std::make_shared<int>(16);
        auto bits = std::make_shared<unsigned>(default_precision_bits());
        auto decomposition = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("certificate.txt");
        cmd_certify->add_option("--n", *n, "polyhedron parameter")->required();
        cmd_certify->add_option("--v0", *v0s, "initial visibility rational")->required();
        cmd_certify->add_option("--nu", *nus, "shrink factor nu as rational, 0 < nu < 1");
        cmd_certify->add_option("--k", *k, "truncation digits");
        cmd_certify->add_option("--precision-bits", *bits, "interval precision (env LHV_PRECISION_BITS)");
        cmd_certify->add_option("--decomposition", *decomposition, "checkpoint file with the decomposition")->required();
        cmd_certify->add_option("--out", *out, "certificate output path");
        cmd_certify->callback([n, v0s, nus, k, bits, decomposition, out, &action]() {
            action = [n, v0s, nus, k, bits, decomposition, out]() {
                lhv::Rational v0 = lhv::parse_rational(*v0s);
                lhv::Rational nu = lhv::parse_rational(*nus);
                if (!(nu > 0 && nu < 1)) throw lhv::InvalidParameterError("nu must satisfy 0 < nu < 1");
                if (v0 < 0 || v0 > 1) throw lhv::InvalidParameterError("v0 must be in [0, 1]");
                print_config({{"command", "certify"},
                              {"n", std::to_string(*n)},
                              {"v0", lhv::rational_to_string(v0)},
                              {"nu", lhv::rational_to_string(nu)},
                              {"k", std::to_string(*k)},
                              {"precision_bits", std::to_string(*bits)},
                              {"decomposition", *decomposition},
                              {"out", *out}});
                lhv::CheckpointSummary summary = lhv::read_checkpoint_summary(*decomposition);
                std::printf("decomposition: iteration=%llu distance=%.9e strategies=%zu\n",
                            static_cast<unsigned long long>(summary.iteration), summary.distance,
                            summary.decomposition.strategies.size());
                lhv::Certificate cert = lhv::certify_decomposition(*n, v0, nu, summary.decomposition,
                                                                   *k, *bits);
                lhv::write_certificate(cert, *out);
                std::printf("residual_bound=%s\n", interval_str(cert.residual_bound).c_str());
                std::printf("v_bound=%s\n", interval_str(cert.v_bound).c_str());
                std::printf("kg3_bound=%s\n", interval_str(cert.kg3_bound).c_str());
                std::printf("verdict=%s\n", cert.verdict ? "true" : "false");
                return cert.verdict ? kExitOk : kExitCertFailure;
            };
        });
    }

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand("verify", "independently re-check a certificate file");
    {
        auto cert = std::make_shared<std::string>();
        cmd_verify->add_option("--cert", *cert, "certificate path")->required();
        cmd_verify->callback([cert, &action]() {
            action = [cert]() {
                print_config({{"command", "verify"}, {"cert", *cert}});
                bool ok = false;
                try {
                    ok = lhv::verify_certificate(*cert);
                } catch (const lhv::ParseError& e) {
                    std::printf("verify: parse failure: %s\n", e.what());
                    return kExitCertFailure;
                }
                std::printf("verify: %s\n", ok ? "valid" : "INVALID");
                return ok ? kExitOk : kExitCertFailure;
            };
        });
    }

    // ---- bound ----
    auto* cmd_bound = app.add_subcommand("bound", "evaluate the certified visibility and Grothendieck bounds");
    {
        auto n = std::make_shared<int>(25);
        auto v0s = std::make_shared<std::string>("689/1000");
        auto nus = std::make_shared<std::string>("999/1000");
        auto bits = std::make_shared<unsigned>(default_precision_bits());
        cmd_bound->add_option("--n", *n, "polyhedron parameter");
        cmd_bound->add_option("--v0", *v0s, "initial visibility rational");
        cmd_bound->add_option("--nu", *nus, "shrink factor rational");
        cmd_bound->add_option("--precision-bits", *bits, "interval precision");
        cmd_bound->callback([n, v0s, nus, bits, &action]() {
            action = [n, v0s, nus, bits]() {
                lhv::Rational v0 = lhv::parse_rational(*v0s);
                lhv::Rational nu = lhv::parse_rational(*nus);
                if (!(nu > 0 && nu < 1)) throw lhv::InvalidParameterError("nu must satisfy 0 < nu < 1");
                if (v0 < 0 || v0 > 1) throw lhv::InvalidParameterError("v0 must be in [0, 1]");
                print_config({{"command", "bound"},
                              {"n", std::to_string(*n)},
                              {"v0", lhv::rational_to_string(v0)},
                              {"nu", lhv::rational_to_string(nu)},
                              {"precision_bits", std::to_string(*bits)}});
                lhv::Interval eta_sq = lhv::shrinking_factor(*n, *bits).sqr();
                lhv::Interval v_bound = lhv::mul_rational(eta_sq, nu * v0);
                lhv::Interval kg3 = v_bound.reciprocal();
                lhv::Interval povm = lhv::povm_visibility_bound(v_bound);
                std::printf("eta_sq=%s\n", interval_str(eta_sq).c_str());
                std::printf("v_bound=%s\n", interval_str(v_bound).c_str());
                std::printf("kg3_bound=%s\n", interval_str(kg3).c_str());
                std::printf("povm_bound=%s\n", interval_str(povm).c_str());
                return kExitOk;
            };
        });
    }

    // ---- povm ----
    auto* cmd_povm = app.add_subcommand("povm", "decompose a noisy POVM into projective measurements");
    {
        auto in = std::make_shared<std::string>();
        auto mu = std::make_shared<double>(0.8);
        auto out = std::make_shared<std::string>("povm_decomposition.txt");
        auto tol = std::make_shared<double>(1e-6);
        auto max_steps = std::make_shared<int>(10000);
        cmd_povm->add_option("--in", *in, "POVM file")->required();
        cmd_povm->add_option("--mu", *mu, "noise factor in (0, 1)")->required();
        cmd_povm->add_option("--out", *out, "decomposition output path");
        cmd_povm->add_option("--tol-weight", *tol, "residual weight tolerance");
        cmd_povm->add_option("--max-steps", *max_steps, "peel step budget");
        cmd_povm->callback([in, mu, out, tol, max_steps, &action]() {
            action = [in, mu, out, tol, max_steps]() {
                print_config({{"command", "povm"},
                              {"in", *in},
                              {"mu", std::to_string(*mu)},
                              {"tol_weight", std::to_string(*tol)},
                              {"max_steps", std::to_string(*max_steps)},
                              {"out", *out}});
                lhv::Povm p = lhv::read_povm(*in);
                if (!lhv::validate_povm(p, 1e-10))
                    throw lhv::ParseError("povm file: element data is not a valid extremal POVM");
                lhv::PovmDecomposition d = lhv::decompose(p, *mu, *tol, *max_steps);
                lhv::write_povm_decomposition(d, *mu, *out);
                std::printf("items=%zu residual_weight=%.3e reconstruction_error=%.3e complete=%s\n",
                            d.items.size(), d.residual_weight, lhv::reconstruction_error(d, p, *mu),
                            d.complete ? "true" : "false");
                return d.complete ? kExitOk : kExitIncomplete;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const lhv::InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lhv::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lhv::CheckpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCertFailure;
    } catch (const lhv::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
