#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ddfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Process exit codes used by the CLI.
enum class ExitCode : int { ok = 0, config = 2, infeasible = 3, io = 4 };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::config; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

// Raised when recorded data cannot support a prediction or gain computation.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, Index achieved_rank = -1, Index required_rank = -1)
        : Error(what), achieved_rank_(achieved_rank), required_rank_(required_rank) {}
    ExitCode exit_code() const noexcept override { return ExitCode::infeasible; }
    Index achieved_rank() const noexcept { return achieved_rank_; }
    Index required_rank() const noexcept { return required_rank_; }

private:
    Index achieved_rank_;
    Index required_rank_;
};

// Non-finite values reached an estimator.
class PoisonedStateError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::infeasible; }
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::string path) : Error(what + ": " + path), path_(std::move(path)) {}
    ExitCode exit_code() const noexcept override { return ExitCode::io; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace ddfc
