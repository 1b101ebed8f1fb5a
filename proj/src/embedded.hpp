#pragma once

#include <string_view>

// Generated at configure time from corpus/*.u and corpus/*.pi.
namespace sessium::embedded {

extern const std::string_view default_universe;
extern const std::string_view seller_buyers;
extern const std::string_view example1_server;
extern const std::string_view multiparty_prime;
extern const std::string_view example2_nonviable;
extern const std::string_view example3_ext;
extern const std::string_view example4_inputs;
extern const std::string_view deadlock;

}  // namespace sessium::embedded
