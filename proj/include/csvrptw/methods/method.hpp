#pragma once

#include <array>
#include <cctype>
#include <string>

#include "csvrptw/core/error.hpp"

namespace csvrptw {

// Prescriptive method roster. The first eight see only training data; the
// last two are benchmarks that peek at the test scenarios of the observed
// context. Order is the reporting order of the result tables.
enum class Method {
    d_avg,
    pto_ols,
    pto_knn,
    saa,
    saa_knn,
    csaa,
    rsaa,
    p_nn,
    pto_f,
    full,
};

inline constexpr std::array<Method, 10> method_roster() {
    return {Method::d_avg, Method::pto_ols, Method::pto_knn, Method::saa,  Method::saa_knn,
            Method::csaa,  Method::rsaa,    Method::p_nn,    Method::pto_f, Method::full};
}

inline const char* method_name(Method m) {
    switch (m) {
        case Method::d_avg: return "D-avg";
        case Method::pto_ols: return "PTO-OLS";
        case Method::pto_knn: return "PTO-kNN";
        case Method::saa: return "SAA";
        case Method::saa_knn: return "SAA-kNN";
        case Method::csaa: return "CSAA";
        case Method::rsaa: return "RSAA";
        case Method::p_nn: return "P-NN";
        case Method::pto_f: return "PTO-F";
        case Method::full: return "Full";
    }
    return "?";
}

inline bool method_is_benchmark(Method m) { return m == Method::pto_f || m == Method::full; }

// Case-insensitive parse; underscores count as hyphens so CLI spellings
// like "pto_ols" resolve.
inline Method method_from_name(const std::string& name) {
    const auto fold = [](const std::string& in) {
        std::string out;
        for (char c : in)
            out += c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    const std::string s = fold(name);
    for (Method m : method_roster())
        if (s == fold(method_name(m))) return m;
    throw ConfigError("unknown method: " + name);
}

}  // namespace csvrptw
