#include "rosenblatt/paths.hpp"

#include "rosenblatt/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <memory>
#include <span>
#include <stdexcept>

namespace rosenblatt {

std::string_view to_string(ProcessTag tag) {
    switch (tag) {
        case ProcessTag::Walk: return "walk";
        case ProcessTag::FBm: return "fbm";
        case ProcessTag::Rosenblatt: return "rosenblatt";
    }
    return "?";
}

ProcessTag parse_process_tag(std::string_view name) {
    if (name == "walk") return ProcessTag::Walk;
    if (name == "fbm") return ProcessTag::FBm;
    if (name == "rosenblatt") return ProcessTag::Rosenblatt;
    throw std::invalid_argument("unknown process '" + std::string(name) + "' (expected walk|fbm|rosenblatt)");
}

int grid_index(double t, int n) {
    if (!(t >= 0.0 && t <= 1.0 + 1e-12)) throw std::domain_error("time must lie in [0, 1]");
    return std::min(n, static_cast<int>(std::floor(t * n + 1e-9)));
}

double GridPath::at(double t) const { return values[static_cast<std::size_t>(grid_index(t, n))]; }

std::vector<double> PathEnsemble::marginal(int m) const {
    if (m < 0 || m > n) throw std::out_of_range("marginal: grid index out of range");
    std::vector<double> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(p.values[static_cast<std::size_t>(m)]);
    return out;
}

double PathEnsemble::hurst() const {
    switch (tag) {
        case ProcessTag::Walk: return 0.5;
        case ProcessTag::FBm: return params.Hp;
        case ProcessTag::Rosenblatt: return params.H;
    }
    return params.H;
}

namespace paths {

namespace {

using Eigen::MatrixXd;

MatrixXd noise_matrix(std::span<const NoiseSequence> noises) {
    const auto n = static_cast<Eigen::Index>(noises.front().size());
    MatrixXd xi(n, static_cast<Eigen::Index>(noises.size()));
    for (std::size_t p = 0; p < noises.size(); ++p) {
        if (static_cast<Eigen::Index>(noises[p].size()) != n) throw std::invalid_argument("noise lengths differ");
        xi.col(static_cast<Eigen::Index>(p)) = Eigen::Map<const Eigen::VectorXd>(noises[p].values.data(), n);
    }
    return xi;
}

// (n+1) x P grid values of the Rosenblatt walk for the noise columns of xi.
MatrixXd rosenblatt_block(const CellBasis& basis, const MatrixXd& xi) {
    const int n = basis.n();
    if (xi.rows() != n) throw std::invalid_argument("noise length must equal the basis grid size");
    const bool unit_square = (xi.array().abs() == 1.0).all();
    const Eigen::VectorXd& w = basis.time_weights();
    const double dH = basis.params().dH;
    MatrixXd z = MatrixXd::Zero(n + 1, xi.cols());
    MatrixXd xi2;
    if (!unit_square) xi2 = xi.array().square().matrix();
    MatrixXd s;
    for (int m = 1; m <= n; ++m) {
        const MatrixXd& g = basis.gamma(m);
        s.noalias() = g * xi.topRows(m);
        Eigen::RowVectorXd inc = w.transpose() * s.array().square().matrix();
        if (unit_square) {
            inc.array() -= w.dot(basis.gamma_sq_sum(m));
        } else {
            inc.noalias() -= w.transpose() * (g.array().square().matrix() * xi2.topRows(m));
        }
        z.row(m) = z.row(m - 1) + dH * inc;
    }
    return z;
}

// n x n matrix whose row m-1 holds the fBm walk weights at time m/n.
MatrixXd fbm_weight_matrix(const CellBasis& basis) {
    const int n = basis.n();
    MatrixXd k = MatrixXd::Zero(n, n);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (int m = 1; m <= n; ++m) {
        acc.head(m).noalias() += basis.gamma(m).transpose() * basis.time_weights();
        k.row(m - 1).head(m) = acc.head(m).transpose();
    }
    return k;
}

MatrixXd fbm_block(const MatrixXd& weights, const MatrixXd& xi) {
    MatrixXd b(xi.rows() + 1, xi.cols());
    b.row(0).setZero();
    b.bottomRows(xi.rows()).noalias() = weights * xi;
    return b;
}

MatrixXd walk_block(const MatrixXd& xi) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(xi.rows()));
    MatrixXd w(xi.rows() + 1, xi.cols());
    w.row(0).setZero();
    for (Eigen::Index m = 0; m < xi.rows(); ++m) w.row(m + 1) = w.row(m) + scale * xi.row(m);
    return w;
}

GridPath to_path(const Eigen::VectorXd& col, ProcessTag tag) {
    GridPath p;
    p.n = static_cast<int>(col.size()) - 1;
    p.tag = tag;
    p.values.assign(col.data(), col.data() + col.size());
    return p;
}

void require_nonempty(const NoiseSequence& noise) {
    if (noise.size() < 1) throw std::invalid_argument("noise sequence must have n >= 1 values");
}

}  // namespace

GridPath random_walk(const NoiseSequence& noise) {
    require_nonempty(noise);
    return to_path(walk_block(noise_matrix({&noise, 1})).col(0), ProcessTag::Walk);
}

GridPath fbm_walk(const NoiseSequence& noise, const CellBasis& basis) {
    require_nonempty(noise);
    if (static_cast<int>(noise.size()) != basis.n()) throw std::invalid_argument("noise length must equal basis n");
    return to_path(fbm_block(fbm_weight_matrix(basis), noise_matrix({&noise, 1})).col(0), ProcessTag::FBm);
}

GridPath fbm_walk(const NoiseSequence& noise, const HurstParams& p, const QuadConfig& q) {
    require_nonempty(noise);
    return fbm_walk(noise, *CellBasis::shared(static_cast<int>(noise.size()), p, q));
}

GridPath rosenblatt_walk(const NoiseSequence& noise, const CellBasis& basis) {
    require_nonempty(noise);
    return to_path(rosenblatt_block(basis, noise_matrix({&noise, 1})).col(0), ProcessTag::Rosenblatt);
}

GridPath rosenblatt_walk(const NoiseSequence& noise, const HurstParams& p, const QuadConfig& q) {
    require_nonempty(noise);
    return rosenblatt_walk(noise, *CellBasis::shared(static_cast<int>(noise.size()), p, q));
}

GridPath rosenblatt_walk_bruteforce(const NoiseSequence& noise, const CellBasis& basis) {
    require_nonempty(noise);
    const int n = basis.n();
    if (static_cast<int>(noise.size()) != n) throw std::invalid_argument("noise length must equal basis n");
    GridPath path{n, ProcessTag::Rosenblatt, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
    MatrixXd c = MatrixXd::Zero(n, n);
    const auto& xi = noise.values;
    for (int m = 1; m <= n; ++m) {
        c.topLeftCorner(m, m) += basis.increment_table(m);
        double z = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j) z += c(i, j) * xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)];
        path.values[static_cast<std::size_t>(m)] = z;
    }
    return path;
}

PathEnsemble simulate_ensemble(std::size_t count, std::uint64_t master_seed, NoiseKind kind, int n,
                               const HurstParams& p, const QuadConfig& q, ProcessTag tag) {
    if (count < 1) throw std::invalid_argument("simulate_ensemble: count must be >= 1");
    if (n < 1) throw std::invalid_argument("simulate_ensemble: n must be >= 1");
    PathEnsemble ens;
    ens.params = p;
    ens.quad = q;
    ens.kind = kind;
    ens.master_seed = master_seed;
    ens.n = n;
    ens.tag = tag;
    ens.paths.resize(count);

    std::shared_ptr<const CellBasis> basis;
    MatrixXd fbm_weights;
    if (tag != ProcessTag::Walk) basis = CellBasis::shared(n, p, q);
    if (tag == ProcessTag::FBm) fbm_weights = fbm_weight_matrix(*basis);

    constexpr std::size_t kBlock = 64;
    const std::size_t blocks = (count + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t first = b * kBlock;
        const std::size_t last = std::min(count, first + kBlock);
        std::vector<NoiseSequence> noises;
        noises.reserve(last - first);
        for (std::size_t k = first; k < last; ++k)
            noises.push_back(make_noise(kind, derive_seed(master_seed, k), static_cast<std::size_t>(n)));
        const MatrixXd xi = noise_matrix(noises);
        MatrixXd values;
        switch (tag) {
            case ProcessTag::Walk: values = walk_block(xi); break;
            case ProcessTag::FBm: values = fbm_block(fbm_weights, xi); break;
            case ProcessTag::Rosenblatt: values = rosenblatt_block(*basis, xi); break;
        }
        for (std::size_t k = first; k < last; ++k)
            ens.paths[k] = to_path(values.col(static_cast<Eigen::Index>(k - first)), tag);
    });
    return ens;
}

GridPath rescale_horizon(const GridPath& path, double T, double hurst) {
    if (!(T > 0.0)) throw std::domain_error("rescale_horizon: T must be > 0");
    GridPath out = path;
    const double f = std::pow(T, hurst);
    for (auto& v : out.values) v *= f;
    return out;
}

double exact_variance(const CellBasis& basis, int m) {
    if (m == 0) return 0.0;
    return 2.0 * basis.coefficient_table(m).squaredNorm();
}

double exact_covariance(const CellBasis& basis, int ms, int mt) {
    if (ms == 0 || mt == 0) return 0.0;
    return 2.0 * basis.coefficient_table(ms).cwiseProduct(basis.coefficient_table(mt)).sum();
}

double exact_increment_variance(const CellBasis& basis, int ms, int mt) {
    if (ms == mt) return 0.0;
    const MatrixXd hi = basis.coefficient_table(std::max(ms, mt));
    if (std::min(ms, mt) == 0) return 2.0 * hi.squaredNorm();
    return 2.0 * (hi - basis.coefficient_table(std::min(ms, mt))).squaredNorm();
}

double exact_qv_mean(const CellBasis& basis, int m) {
    double s = 0.0;
    for (int k = 1; k <= m; ++k) s += 2.0 * basis.increment_table(k).squaredNorm();
    return s;
}

double exact_fbm_covariance(const CellBasis& basis, int ms, int mt) {
    if (ms == 0 || mt == 0) return 0.0;
    return basis.fbm_weights(ms).dot(basis.fbm_weights(mt));
}

void write_ensemble_csv(const std::filesystem::path& path, const PathEnsemble& ens) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::fputs("path_id,m,t,value\n", f);
    for (std::size_t k = 0; k < ens.paths.size(); ++k) {
        const auto& p = ens.paths[k];
        for (int m = 0; m <= p.n; ++m)
            std::fprintf(f, "%zu,%d,%.17g,%.17g\n", k, m, p.time(m), p.values[static_cast<std::size_t>(m)]);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace paths
}  // namespace rosenblatt
