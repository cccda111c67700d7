#include "lhv/gilbert.hpp"

#include "lhv/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace lhv {

std::vector<double> GilbertState::true_weights() const {
    std::vector<double> w(weights_raw.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = weight_scale * weights_raw[i];
    return w;
}

double GilbertState::weight_sum() const {
    double s = 0.0;
    for (double w : weights_raw) s += w;
    return weight_scale * s;
}

ConvexDecomposition GilbertState::decomposition() const {
    ConvexDecomposition d;
    d.m = target.m;
    d.strategies = strategies;
    d.weights = true_weights();
    return d;
}

CorrelationMatrix GilbertState::recompute_current() const {
    return decomposition().mixture();
}

void GilbertState::renormalize_weights() {
    double s = 0.0;
    for (double w : weights_raw) s += w;
    if (s <= 0.0) throw InternalError("renormalize_weights: nonpositive weight sum");
    for (double& w : weights_raw) w /= s;
    weight_scale = 1.0;
    ++renorm_count;
}

void GilbertState::rebuild_index() {
    index.clear();
    for (size_t i = 0; i < strategies.size(); ++i) index.emplace(strategies[i], i);
}

GilbertState gilbert_init(const CorrelationMatrix& target, uint64_t seed) {
    if (!target.entries_within(1.0, 1e-12))
        throw InvalidParameterError("gilbert_init: target entries must lie in [-1, 1]");

    GilbertState st;
    st.target = target;
    st.current = CorrelationMatrix(target.m);
    st.seed = seed;

    // The all-zero start point: uniform mixture of the all-plus strategy and
    // its global a-flip.
    DeterministicStrategy plus(target.m);
    DeterministicStrategy flipped(target.m);
    for (int i = 0; i < target.m; ++i) {
        plus.set_a(i, 1);
        plus.set_b(i, 1);
        flipped.set_a(i, -1);
        flipped.set_b(i, 1);
    }
    st.strategies = {plus, flipped};
    st.weights_raw = {0.5, 0.5};
    st.weight_scale = 1.0;
    st.rebuild_index();
    st.distance = target.frobenius_norm();
    return st;
}

bool gilbert_step(GilbertState& state, const OracleFn& oracle) {
    const int m = state.target.m;
    const size_t mm = state.target.entries.size();

    CorrelationMatrix G(m);
    for (size_t i = 0; i < mm; ++i) G.entries[i] = state.target.entries[i] - state.current.entries[i];

    OracleResult l = oracle(G, state.iteration);
    if (l.strategy.m != m) throw InternalError("gilbert_step: oracle returned wrong size");

    // diff = D_lambda - current; exact line search on [current, D_lambda]
    double denom = 0.0, num = 0.0;
    {
        const DeterministicStrategy& s = l.strategy;
        for (int x = 0; x < m; ++x) {
            double ax = s.a_sign(x);
            const double* crow = &state.current.entries[static_cast<size_t>(x) * m];
            const double* grow = &G.entries[static_cast<size_t>(x) * m];
            for (int y = 0; y < m; ++y) {
                double d = ax * s.b_sign(y) - crow[y];
                denom += d * d;
                num += grow[y] * d;
            }
        }
    }

    ++state.iteration;
    if (denom == 0.0) return false; // oracle vertex equals current point

    double t = num / denom;
    if (t <= 0.0) return false;
    if (t > 1.0) t = 1.0;

    // candidate update; reject if floating-point evaluation ever increased
    // the distance (keeps the recorded distance exactly nonincreasing)
    CorrelationMatrix next(m);
    {
        const DeterministicStrategy& s = l.strategy;
        for (int x = 0; x < m; ++x) {
            double ax = s.a_sign(x);
            const double* crow = &state.current.entries[static_cast<size_t>(x) * m];
            double* nrow = &next.entries[static_cast<size_t>(x) * m];
            for (int y = 0; y < m; ++y) nrow[y] = crow[y] + t * (ax * s.b_sign(y) - crow[y]);
        }
    }
    double ndist = frobenius_distance(state.target, next);
    if (ndist > state.distance) return false;

    state.current = std::move(next);
    state.distance = ndist;

    if (t >= 1.0) {
        state.strategies = {l.strategy};
        state.weights_raw = {1.0};
        state.weight_scale = 1.0;
        state.rebuild_index();
    } else {
        state.weight_scale *= (1.0 - t);
        auto it = state.index.find(l.strategy);
        if (it == state.index.end()) {
            state.strategies.push_back(l.strategy);
            state.weights_raw.push_back(t / state.weight_scale);
            state.index.emplace(l.strategy, state.strategies.size() - 1);
        } else {
            state.weights_raw[it->second] += t / state.weight_scale;
        }
        if (state.weight_scale < 1e-250) state.renormalize_weights();
    }
    return true;
}

namespace {

void checkpoint_consistency_check(const GilbertState& state) {
    CorrelationMatrix rebuilt = state.recompute_current();
    double drift = frobenius_distance(rebuilt, state.current);
    if (drift > 1e-9)
        throw InternalError("checkpoint consistency: decomposition drifted from current by " +
                            std::to_string(drift));
    double wsum = state.weight_sum();
    if (std::fabs(wsum - 1.0) > 1e-12)
        throw InternalError("checkpoint consistency: weight sum " + std::to_string(wsum));
    double dist = frobenius_distance(state.target, state.current);
    if (std::fabs(dist - state.distance) > 1e-12 * std::max(1.0, dist))
        throw InternalError("checkpoint consistency: stored distance stale");
}

} // namespace

RunOutcome gilbert_run(GilbertState& state, const RunOptions& opts, const OracleFn& oracle) {
    if (!(opts.eps >= 0.0)) throw InvalidParameterError("gilbert_run: eps must be nonnegative");

    if (opts.on_iteration) opts.on_iteration(state);
    while (state.distance > opts.eps) {
        if (state.iteration >= opts.max_iters) return RunOutcome::IterationBudget;
        gilbert_step(state, oracle);
        if (opts.on_iteration) opts.on_iteration(state);
        if (opts.checkpoint_every > 0 && state.iteration % opts.checkpoint_every == 0) {
            checkpoint_consistency_check(state);
            if (!opts.checkpoint_path.empty()) save_checkpoint(state, opts.checkpoint_path);
            if (opts.on_checkpoint) opts.on_checkpoint(state);
        }
    }
    return RunOutcome::Converged;
}

namespace {

constexpr char kMagic[8] = {'G', 'L', 'B', 'C', 'K', 'P', 'T', '1'};
constexpr uint32_t kVersion = 1;

struct Fnv64 {
    uint64_t h = 0xcbf29ce484222325ull;
    void update(const void* data, size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    }
};

class CheckpointWriter {
public:
    explicit CheckpointWriter(std::ofstream& out) : out_(out) {}
    template <typename T>
    void write(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        hash_.update(&v, sizeof v);
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void write_bytes(const void* p, size_t n) {
        hash_.update(p, n);
        out_.write(static_cast<const char*>(p), n);
    }
    uint64_t digest() const { return hash_.h; }

private:
    std::ofstream& out_;
    Fnv64 hash_;
};

class CheckpointReader {
public:
    explicit CheckpointReader(std::ifstream& in) : in_(in) {}
    template <typename T>
    T read(const char* field) {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in_) throw CheckpointError(std::string("checkpoint truncated at field: ") + field);
        hash_.update(&v, sizeof v);
        return v;
    }
    void read_bytes(void* p, size_t n, const char* field) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw CheckpointError(std::string("checkpoint truncated at field: ") + field);
        hash_.update(p, n);
    }
    uint64_t digest() const { return hash_.h; }

private:
    std::ifstream& in_;
    Fnv64 hash_;
};

} // namespace

void save_checkpoint(const GilbertState& state, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open checkpoint for writing: " + tmp);
        CheckpointWriter w(out);
        w.write_bytes(kMagic, sizeof kMagic);
        w.write(kVersion);
        w.write(static_cast<uint32_t>(state.target.m));
        w.write(state.iteration);
        w.write(state.seed);
        w.write(matrix_hash(state.target));
        w.write(state.renorm_count);
        w.write(static_cast<uint64_t>(state.strategies.size()));
        int words = DeterministicStrategy::words_for(state.target.m);
        for (size_t i = 0; i < state.strategies.size(); ++i) {
            const DeterministicStrategy& s = state.strategies[i];
            w.write_bytes(s.a_bits.data(), static_cast<size_t>(words) * 8);
            w.write_bytes(s.b_bits.data(), static_cast<size_t>(words) * 8);
            w.write(state.weight_scale * state.weights_raw[i]);
        }
        w.write_bytes(state.current.entries.data(), state.current.entries.size() * 8);
        w.write(state.distance);
        uint64_t checksum = w.digest();
        out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
        if (!out) throw IoError("checkpoint write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("checkpoint rename failed: " + ec.message());
}

namespace {

GilbertState load_checkpoint_impl(const std::string& path, const CorrelationMatrix* target,
                                  CheckpointSummary* summary_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    CheckpointReader r(in);

    char magic[8];
    r.read_bytes(magic, sizeof magic, "magic");
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw CheckpointError("checkpoint: bad magic bytes");
    uint32_t version = r.read<uint32_t>("version");
    if (version != kVersion)
        throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
    uint32_t m = r.read<uint32_t>("m");
    if (m == 0 || m > 100000) throw CheckpointError("checkpoint: implausible m");

    GilbertState st;
    st.iteration = r.read<uint64_t>("iteration");
    st.seed = r.read<uint64_t>("rng_state");
    uint64_t thash = r.read<uint64_t>("target_hash");
    st.renorm_count = r.read<uint64_t>("renorm_count");
    uint64_t count = r.read<uint64_t>("decomposition_count");
    int words = DeterministicStrategy::words_for(static_cast<int>(m));
    st.strategies.reserve(count);
    st.weights_raw.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        DeterministicStrategy s(static_cast<int>(m));
        r.read_bytes(s.a_bits.data(), static_cast<size_t>(words) * 8, "strategy_a_bits");
        r.read_bytes(s.b_bits.data(), static_cast<size_t>(words) * 8, "strategy_b_bits");
        double wgt = r.read<double>("strategy_weight");
        if (!(wgt >= 0.0)) throw CheckpointError("checkpoint: negative weight record");
        st.strategies.push_back(std::move(s));
        st.weights_raw.push_back(wgt);
    }
    st.weight_scale = 1.0;
    st.current = CorrelationMatrix(static_cast<int>(m));
    r.read_bytes(st.current.entries.data(), st.current.entries.size() * 8, "current_matrix");
    st.distance = r.read<double>("distance");
    uint64_t expect = r.digest();
    uint64_t checksum;
    in.read(reinterpret_cast<char*>(&checksum), sizeof checksum);
    if (!in) throw CheckpointError("checkpoint truncated at field: checksum");
    if (checksum != expect) throw CheckpointError("checkpoint: checksum mismatch");
    char extra;
    if (in.read(&extra, 1)) throw CheckpointError("checkpoint: trailing bytes after checksum");

    if (summary_out) {
        summary_out->m = static_cast<int>(m);
        summary_out->iteration = st.iteration;
        summary_out->distance = st.distance;
        summary_out->decomposition.m = static_cast<int>(m);
        summary_out->decomposition.strategies = st.strategies;
        summary_out->decomposition.weights = st.weights_raw;
        return st;
    }

    if (!target) throw CheckpointError("checkpoint: target required");
    if (target->m != static_cast<int>(m)) throw CheckpointError("checkpoint: target size mismatch");
    if (matrix_hash(*target) != thash)
        throw CheckpointError("checkpoint: target hash mismatch (field target_hash)");
    st.target = *target;
    st.rebuild_index();
    return st;
}

} // namespace

GilbertState load_checkpoint(const std::string& path, const CorrelationMatrix& target) {
    return load_checkpoint_impl(path, &target, nullptr);
}

CheckpointSummary read_checkpoint_summary(const std::string& path) {
    CheckpointSummary s;
    load_checkpoint_impl(path, nullptr, &s);
    return s;
}

} // namespace lhv
