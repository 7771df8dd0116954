#include "rosenblatt/weight_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rosenblatt::kernel {

WeightTable weight_table(int m, const CellBasis& basis) {
    return WeightTable{basis.n(), m, basis.coefficient_table(m)};
}

WeightTable weight_table(int m, int n, const HurstParams& p, const QuadConfig& q) {
    if (m < 1 || m > n) throw std::domain_error("weight_table: need 1 <= m <= n");
    return weight_table(m, *CellBasis::shared(n, p, q));
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_weight_table_csv(const std::filesystem::path& path, const WeightTable& table, const WeightTableKey& key) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "H,n,m,rel_tol\n";
    out << fmt17(key.H) << ',' << key.n << ',' << key.m << ',' << fmt17(key.rel_tol) << '\n';
    for (int i = 2; i <= table.n; ++i) {
        for (int j = 1; j < i; ++j) {
            if (j > 1) out << ',';
            out << fmt17(table(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

WeightTable read_weight_table_csv(const std::filesystem::path& path, WeightTableKey* key_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    auto bad = [&](const std::string& why) { return std::runtime_error(path.string() + ": " + why); };
    std::string line;
    if (!std::getline(in, line) || line != "H,n,m,rel_tol") throw bad("missing header line");
    if (!std::getline(in, line)) throw bad("missing key line");
    WeightTableKey key;
    {
        std::istringstream ks(line);
        char c1, c2, c3;
        if (!(ks >> key.H >> c1 >> key.n >> c2 >> key.m >> c3 >> key.rel_tol) || c1 != ',' || c2 != ',' || c3 != ',')
            throw bad("malformed key line");
    }
    if (key.n < 1 || key.m < 1 || key.m > key.n) throw bad("invalid n or m");
    WeightTable t{key.n, key.m, Eigen::MatrixXd::Zero(key.n, key.n)};
    for (int i = 2; i <= key.n; ++i) {
        if (!std::getline(in, line)) throw bad("truncated table");
        std::istringstream rs(line);
        for (int j = 1; j < i; ++j) {
            std::string cell;
            if (!std::getline(rs, cell, ',')) throw bad("short row " + std::to_string(i));
            const double v = std::stod(cell);
            t.coeffs(i - 1, j - 1) = v;
            t.coeffs(j - 1, i - 1) = v;
        }
    }
    if (key_out) *key_out = key;
    return t;
}

WeightTable load_or_build_weight_table(const std::filesystem::path& dir, int m, int n, const HurstParams& p,
                                       const QuadConfig& q) {
    const WeightTableKey key{p.H, n, m, q.rel_tol};
    std::ostringstream name;
    name << "weights_H" << fmt17(p.H) << "_n" << n << "_m" << m << "_tol" << fmt17(q.rel_tol) << ".csv";
    const auto path = dir / name.str();
    if (std::filesystem::exists(path)) {
        WeightTableKey stored;
        WeightTable t = read_weight_table_csv(path, &stored);
        if (stored == key) return t;
    }
    WeightTable t = weight_table(m, n, p, q);
    std::filesystem::create_directories(dir);
    write_weight_table_csv(path, t, key);
    return t;
}

}  // namespace rosenblatt::kernel
