#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pnpvem {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Element with nonpositive area, or a singular projector system.
class InvalidElement : public Error
{
public:
    InvalidElement(int element, const std::string& what)
        : Error("element " + std::to_string(element) + ": " + what), element_(element)
    {}
    int element() const { return element_; }

private:
    int element_;
};

/// Element that cannot be fan-triangulated from an interior point.
class ElementQualityError : public Error
{
public:
    using Error::Error;
};

class MeshFormatError : public Error
{
public:
    using Error::Error;
};

class SolverFailure : public Error
{
public:
    SolverFailure(const std::string& what, double residual, int iterations)
        : Error(what + " (relative residual " + std::to_string(residual) + " after "
                + std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations)
    {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class GummelNonconvergence : public Error
{
public:
    GummelNonconvergence(int step, std::vector<double> increments)
        : Error("Gummel iteration did not converge at step " + std::to_string(step)),
          step_(step), increments_(std::move(increments))
    {}
    int step() const { return step_; }
    const std::vector<double>& increments() const { return increments_; }

private:
    int step_;
    std::vector<double> increments_;
};

} // namespace pnpvem
