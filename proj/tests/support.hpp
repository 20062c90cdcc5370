#pragma once

// Shared fixtures and independent oracles. The oracles recompute results
// from first principles (dense factorizations, brute-force sums) so they
// share no code with the production path they check.

#include "vulnet/flow.hpp"
#include "vulnet/kernel.hpp"
#include "vulnet/restriction.hpp"
#include "vulnet/synthetic.hpp"
#include "vulnet/vulnerability.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>

namespace support {

struct Calibrated {
    vulnet::FlowMatrix matrix;
    vulnet::SizeWeights sizes;
    vulnet::AllocationMatrix allocation;
    vulnet::LeakageRates leakage;
};

inline Calibrated calibrate(const vulnet::FlowTable& table) {
    Calibrated cal;
    cal.matrix = vulnet::build_flow_matrix(table, table.index());
    cal.sizes = vulnet::compute_sizes(cal.matrix);
    cal.allocation = vulnet::compute_allocation(cal.matrix, cal.sizes);
    cal.leakage = vulnet::compute_leakage(cal.matrix);
    return cal;
}

/// y with y^T = mu^T (I-K)^{-1}, by dense LU on the transposed system.
inline Eigen::VectorXd dense_exposure(const Eigen::SparseMatrix<double>& K,
                                      const Eigen::VectorXd& mu) {
    Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(K.rows(), K.cols()) - Eigen::MatrixXd(K);
    return Eigen::PartialPivLU<Eigen::MatrixXd>(system.transpose()).solve(mu);
}

/// gamma via the dense resolvent-difference path, summed brute force.
inline double oracle_gamma(const vulnet::PropagationKernel& benchmark,
                           const vulnet::PropagationKernel& restricted,
                           const vulnet::SelectorSet& sel, const vulnet::SizeWeights& Z) {
    Eigen::VectorXd y = dense_exposure(benchmark.K, sel.mu);
    Eigen::VectorXd y_circ = dense_exposure(restricted.K, sel.mu);
    double gamma = 0.0;
    for (Eigen::Index l = 0; l < sel.nu.size(); ++l) {
        if (sel.nu[l] != 0.0) gamma += (y[l] - y_circ[l]) * Z.z[l];
    }
    return gamma;
}

/// Allocation built from a dense column-share matrix, for hand examples.
/// Columns with positive mass are active.
inline vulnet::AllocationMatrix allocation_from_dense(const Eigen::MatrixXd& A) {
    vulnet::AllocationMatrix out;
    out.shares = A.sparseView();
    out.shares.makeCompressed();
    out.active.assign(static_cast<std::size_t>(A.cols()), 0);
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        if (A.col(j).sum() > 0.0) out.active[static_cast<std::size_t>(j)] = 1;
    }
    return out;
}

inline vulnet::LeakageRates leakage_from(std::initializer_list<double> rates) {
    vulnet::LeakageRates out;
    out.beta = Eigen::VectorXd(static_cast<Eigen::Index>(rates.size()));
    Eigen::Index i = 0;
    for (double r : rates) out.beta[i++] = r;
    return out;
}

inline vulnet::SizeWeights sizes_from(std::initializer_list<double> zs) {
    vulnet::SizeWeights out;
    out.z = Eigen::VectorXd(static_cast<Eigen::Index>(zs.size()));
    Eigen::Index i = 0;
    for (double z : zs) out.z[i++] = z;
    return out;
}

/// Bitwise equality for dense Eigen objects (operator== on matrices is
/// coefficient-wise, not boolean).
template <typename A, typename B>
bool exact_equal(const A& a, const B& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a.array() == b.array()).all();
}

inline bool exact_equal_sparse(const Eigen::SparseMatrix<double>& a,
                               const Eigen::SparseMatrix<double>& b) {
    return exact_equal(Eigen::MatrixXd(a), Eigen::MatrixXd(b));
}

/// Unique scratch directory, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("vulnet_" + tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
                 std::to_string(static_cast<unsigned long long>(std::random_device{}())));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// File content with every line whose prefix matches dropped; used to
/// compare report files modulo the timestamp header.
inline std::string read_file_without(const std::filesystem::path& path,
                                     const std::string& prefix) {
    std::ifstream in(path);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) continue;
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace support
