#include "gnormal/io.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

namespace gnormal::io {

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, ptr);
}

namespace {

std::string optional_cell(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string{};
}

}  // namespace

std::string density_csv(const DensityTable& table)
{
    std::string out = "x,mass,density\n";
    for (const auto& row : table.rows) {
        out += format_double(row.x);
        out += ',';
        out += format_double(row.mass);
        out += ',';
        out += format_double(row.density);
        out += '\n';
    }
    return out;
}

std::string density_json(const DensityTable& table)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : table.rows) {
        arr.push_back({{"x", row.x}, {"mass", row.mass}, {"density", row.density}});
    }
    return arr.dump(2) + "\n";
}

std::string histogram_csv(const std::vector<HistogramRow>& rows)
{
    std::string out = "x,empirical_mass,empirical_density\n";
    for (const auto& row : rows) {
        out += format_double(row.x);
        out += ',';
        out += format_double(row.mass);
        out += ',';
        out += format_double(row.density);
        out += '\n';
    }
    return out;
}

std::string density_study_csv(const std::vector<RefinementRow>& rows)
{
    std::string out = "N,h,error,rate\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n_steps) + "," + format_double(row.h) + ","
               + format_double(row.error) + "," + optional_cell(row.rate) + "\n";
    }
    return out;
}

std::string curvature_study_csv(const std::vector<CurvatureRow>& rows)
{
    std::string out = "N,err_V,order_V,err_W,order_W\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n_steps) + "," + format_double(row.err_v) + ","
               + optional_cell(row.order_v) + "," + format_double(row.err_w) + ","
               + optional_cell(row.order_w) + "\n";
    }
    return out;
}

std::string canonical_json(const std::string& text)
{
    return nlohmann::json::parse(text).dump(2) + "\n";
}

}  // namespace gnormal::io
