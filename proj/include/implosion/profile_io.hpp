#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "implosion/params.hpp"
#include "implosion/profile.hpp"

namespace implosion {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kProfileColumns = "y,rho,omega,u,p,G,mass,drho_dy,domega_dy";

struct ProfileFile {
    double gamma = 0;
    int n = 0;
    double alpha = 0;
    std::vector<ProfileState> states;
};

// Header, column line, one row per sample, then a "# end rows=<N>" trailer.
void write_profile(std::ostream& out, const Params& params, const std::vector<ProfileSample>& samples);
// Only (y, rho, omega) are kept. Throws ParseError on any malformed or missing line.
ProfileFile read_profile(std::istream& in);

std::string format_double(double v);

}  // namespace implosion
