#include <cointbreak/errors.hpp>
#include <cointbreak/report.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cointbreak {

namespace {

using json = nlohmann::ordered_json;

json number(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(number(v(i)));
    }
    return out;
}

json named_slopes(const Eigen::RowVectorXd& row, const ReportContext& context) {
    json out = json::object();
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const std::string name = k < context.regressors.size() ? context.regressors[k] : "x" + std::to_string(k + 1);
        out[name] = number(row(i));
    }
    return out;
}

// Label of an original-sample index, or null without a date column.
json label_of(const TimeSeriesData& data, std::size_t original) {
    if (data.labels().empty()) {
        return nullptr;
    }
    return data.labels()[data.local_index(original) - 1];
}

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

json model_json(const TimeSeriesData& data, const BreakModel& model, const ReportContext& context) {
    const std::size_t length = context.sample_length > 0 ? context.sample_length
                                                         : data.original_index(data.length());
    const std::size_t first = data.first_index();
    const std::size_t last = data.original_index(data.length());

    json j;
    j["num_breaks"] = model.num_breaks();
    json breaks = json::array();
    for (auto b : model.breakpoints) {
        breaks.push_back({{"index", b},
                          {"label", label_of(data, b)},
                          {"fraction", static_cast<double>(b) / static_cast<double>(length)}});
    }
    j["breakpoints"] = std::move(breaks);

    json regimes = json::array();
    for (std::size_t r = 0; r <= model.num_breaks(); ++r) {
        const std::size_t from = r == 0 ? first : model.breakpoints[r - 1];
        const std::size_t to = r == model.num_breaks() ? last : model.breakpoints[r] - 1;
        regimes.push_back({{"first", from},
                           {"last", to},
                           {"first_label", label_of(data, from)},
                           {"last_label", label_of(data, to)},
                           {"beta", named_slopes(model.segment_betas.row(static_cast<Eigen::Index>(r)), context)}});
    }
    j["regimes"] = std::move(regimes);
    j["intercept"] = number(model.intercept);
    j["augment_coefs"] = vector_json(model.augment_coefs);
    j["ssr"] = number(model.ssr);
    j["observations"] = data.length();
    j["first_index"] = first;
    return j;
}

std::size_t selected_path_index(const std::vector<Stage1Solution>& path) {
    std::size_t best = 0;
    double best_ic = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i].ic_value < best_ic || (path[i].ic_value == best_ic && path[i].lambda > path[best].lambda)) {
            best_ic = path[i].ic_value;
            best = i;
        }
    }
    return best;
}

json ic_trace_json(const std::vector<Stage1Solution>& path, std::size_t selected) {
    json out = json::array();
    for (std::size_t i = 0; i < path.size(); ++i) {
        out.push_back({{"lambda", number(path[i].lambda)},
                       {"active", path[i].active_set.size()},
                       {"ssr", number(path[i].ssr)},
                       {"ic", number(path[i].ic_value)},
                       {"selected", i == selected}});
    }
    return out;
}

json lasso_json(const TimeSeriesData& data, const EstimateTrace& trace, const ReportContext& context) {
    json j = model_json(data, trace.model, context);
    const auto original = [&](const std::vector<std::size_t>& local) {
        json out = json::array();
        for (auto t : local) {
            out.push_back(data.original_index(t));
        }
        return out;
    };

    json s1;
    s1["lambda"] = number(trace.stage1.lambda);
    s1["ic"] = number(trace.stage1.ic_value);
    s1["ssr"] = number(trace.stage1.ssr);
    s1["active"] = original(trace.stage1.active_set);
    s1["kkt_violation"] = number(trace.stage1.kkt_violation);
    s1["converged"] = trace.stage1.converged;
    s1["ic_trace"] = ic_trace_json(trace.path, selected_path_index(trace.path));
    j["stage1"] = std::move(s1);

    j["candidates"] = original(trace.candidates);
    json weights = json::array();
    for (std::size_t i = 0; i < trace.weights.candidates.size(); ++i) {
        weights.push_back({{"index", data.original_index(trace.weights.candidates[i])},
                           {"weight", number(trace.weights.weights[i])}});
    }
    j["weights"] = std::move(weights);

    if (trace.stage2) {
        json s2;
        s2["lambda"] = number(trace.stage2->lambda);
        s2["bic"] = number(trace.stage2->bic);
        s2["ssr"] = number(trace.stage2->ssr);
        s2["active"] = original(trace.stage2->active);
        s2["kkt_violation"] = number(trace.stage2->kkt_violation);
        s2["converged"] = trace.stage2->converged;
        j["stage2"] = std::move(s2);
    } else {
        j["stage2"] = nullptr;
    }
    return j;
}

json bai_perron_json(const TimeSeriesData& data, const BaiPerronFit& fit, const ReportContext& context) {
    json j = model_json(data, fit.model, context);
    json trace = json::array();
    for (std::size_t m = 0; m < fit.partitions.size(); ++m) {
        json breaks = json::array();
        for (auto t : fit.partitions[m].breakpoints) {
            breaks.push_back(data.original_index(t));
        }
        trace.push_back({{"m", m},
                         {"segment_ssr", number(fit.partitions[m].ssr)},
                         {"bic", number(fit.bic[m])},
                         {"breakpoints", std::move(breaks)},
                         {"selected", m == fit.selected}});
    }
    j["bic_trace"] = std::move(trace);
    return j;
}

std::string format_path(const std::vector<Stage1Solution>& path, char delimiter) {
    const std::size_t selected = selected_path_index(path);
    std::ostringstream out;
    out << "lambda" << delimiter << "active" << delimiter << "ssr" << delimiter << "ic" << delimiter << "selected\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << real(path[i].lambda) << delimiter << path[i].active_set.size() << delimiter << real(path[i].ssr)
            << delimiter << real(path[i].ic_value) << delimiter << (i == selected ? "*" : "") << '\n';
    }
    return out.str();
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    out << doc.dump(2) << '\n';
}

} // namespace cointbreak
