#pragma once

#include <stdexcept>
#include <string>

namespace qghjm {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad inputs: negative sigma, non-increasing knots, t outside a trajectory, ...
struct InvalidArgument : Error {
    using Error::Error;
};

// An operation was called in a regime where its result does not exist
// (stationary limit past the critical coupling, fixed points below beta_C, ...).
struct WrongRegime : Error {
    using Error::Error;
};

// Explosion-time routines require beta < beta_C = sigma*sqrt(2*lambda0).
struct Supercritical : WrongRegime {
    using WrongRegime::WrongRegime;
};

// wp_equianharmonic called within 1e-10 of a lattice point 2*k*omega2.
struct PoleProximity : Error {
    using Error::Error;
};

} // namespace qghjm
