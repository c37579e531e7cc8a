#include "toda/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <openssl/evp.h>

namespace toda::report {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string num(int v) { return std::to_string(v); }

void CsvTable::add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

CsvTable series_table(const std::vector<PowerSeries>& powers, int first, int step) {
    CsvTable t({"p", "m", "re", "im", "log_scale"});
    for (std::size_t k = 0; k < powers.size(); ++k)
        for (int m = 0; m <= powers[k].order(); ++m)
            t.add({num(first + static_cast<int>(k) * step), num(m), num(powers[k][m].real()),
                   num(powers[k][m].imag()), num(powers[k].log_scale)});
    return t;
}

CsvTable char_table(const std::vector<CharPoint>& chars) {
    CsvTable t({"x_re", "x_im", "modulus", "lambda_re", "lambda_im", "kappa_re", "kappa_im",
                "simple", "fold_ok"});
    for (const auto& c : chars)
        t.add({num(c.x_star.real()), num(c.x_star.imag()), num(c.modulus), num(c.lambda.real()),
               num(c.lambda.imag()), num(c.kappa.real()), num(c.kappa.imag()),
               c.simple ? "1" : "0", c.fold_ok ? "1" : "0"});
    return t;
}

CsvTable scan_table(const std::vector<ScanPoint>& scan) {
    CsvTable t({"delta", "epsilon", "L", "q", "k", "mu", "mu_over_L", "gamma", "c_norm", "c_hs",
                "status"});
    const std::string nan = num(std::nan(""));
    for (const auto& p : scan) {
        if (p.status != "ok") {
            t.add({num(p.delta), nan, nan, nan, nan, nan, nan, nan, nan, nan, p.status});
            continue;
        }
        for (const auto& b : p.blocks)
            for (Eigen::Index k = 0; k < b.mu.size(); ++k)
                t.add({num(p.delta), num(b.epsilon), num(b.L), num(b.q),
                       num(static_cast<int>(k + 1)), num(b.mu[k]), num(b.mu[k] / b.L),
                       num(b.gamma), num(b.c_norm), num(b.c_hs), p.status});
    }
    return t;
}

CsvTable spike_table(const std::vector<ScanPoint>& scan) {
    CsvTable t({"delta", "q", "j", "re", "im"});
    for (const auto& p : scan)
        for (const auto& b : p.blocks)
            for (Eigen::Index j = 0; j < b.spike.size(); ++j)
                t.add({num(p.delta), num(b.q), num(static_cast<int>(j)), num(b.spike[j].real()),
                       num(b.spike[j].imag())});
    return t;
}

CsvTable trajectory_table(const Thresholds& th, const Leaf& leaf) {
    std::vector<std::string> header{"T", "r"};
    for (int n = 0; n < leaf.size(); ++n) header.push_back("a_" + std::to_string(n + 1));
    header.push_back("t_0");
    for (int k : leaf.exponents) header.push_back("t_" + std::to_string(k));
    header.push_back("rho_star");
    header.push_back("univalence_margin");
    CsvTable t(header);
    for (std::size_t i = 0; i < th.trajectory.size(); ++i) {
        const auto& s = th.trajectory[i];
        std::vector<std::string> row{num(s.T), num(s.r)};
        for (auto a : s.a) row.push_back(num(a.real()));
        for (auto m : s.moments) row.push_back(num(m.real()));
        row.push_back(num(th.rho_star[i]));
        row.push_back(num(s.univalence_margin));
        t.add(row);
    }
    return t;
}

CsvTable phase_table(const std::vector<PhaseRow>& rows) {
    CsvTable t({"b", "c_or_gamma", "rho_char", "|x_plus|", "|x_minus|", "conjugate_pair",
                "error_code"});
    for (const auto& r : rows)
        t.add({num(r.b), num(r.c_or_gamma), num(r.rho_char), num(r.abs_x_plus),
               num(r.abs_x_minus), r.conjugate_pair ? "1" : "0", r.error_code});
    return t;
}

CsvTable contour_table(const std::vector<ContourPoint>& contour) {
    CsvTable t({"b", "level", "error_code"});
    for (const auto& c : contour) t.add({num(c.b), num(c.level), c.error_code});
    return t;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("IOError", "cannot open " + tmp);
        f << content;
        if (!f) throw Error("IOError", "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("IOError", "rename to " + path + " failed: " + ec.message());
}

std::string git_blob_hash(const std::string& content) {
    std::string data = "blob " + std::to_string(content.size());
    data.push_back('\0');
    data += content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

}  // namespace toda::report
