#include "geomon/scenario.hpp"

#include <cmath>
#include <fstream>

namespace geomon::sim {

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace

ExperimentScenario ExperimentScenario::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
}

ExperimentScenario ExperimentScenario::from_json(const nlohmann::json& j) {
    ExperimentScenario s;
    s.name = get_or<std::string>(j, "name", s.name);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    s.duration_s = get_or<double>(j, "duration_s", s.duration_s);
    s.epoch_rate_hz = get_or<double>(j, "epoch_rate_hz", s.epoch_rate_hz);
    s.constellation = get_or<std::string>(j, "constellation", s.constellation);
    s.site_id = get_or<int>(j, "site_id", s.site_id);
    s.station_id = get_or<int>(j, "station_id", s.station_id);
    s.noise_sigma_mm = get_or<double>(j, "noise_sigma_mm", s.noise_sigma_mm);
    s.elevation_mask_deg = get_or<double>(j, "elevation_mask_deg", s.elevation_mask_deg);
    s.model_error_sources = get_or<bool>(j, "model_error_sources", s.model_error_sources);

    if (j.contains("site")) {
        const auto& js = j.at("site");
        s.site.lat_deg = get_or<double>(js, "lat_deg", s.site.lat_deg);
        s.site.lon_deg = get_or<double>(js, "lon_deg", s.site.lon_deg);
        s.site.height_m = get_or<double>(js, "height_m", s.site.height_m);
    }

    if (j.contains("baseline_truth_mm")) {
        s.truth.clear();
        for (const auto& step : j.at("baseline_truth_mm")) {
            TruthStep t;
            t.from_s = get_or<double>(step, "from_s", 0.0);
            t.east_mm = get_or<double>(step, "east", 0.0);
            t.north_mm = get_or<double>(step, "north", 0.0);
            t.up_mm = get_or<double>(step, "up", 0.0);
            s.truth.push_back(t);
        }
    }

    if (j.contains("spike")) {
        const auto& js = j.at("spike");
        s.spike.rate = get_or<double>(js, "rate", s.spike.rate);
        s.spike.min_mm = get_or<double>(js, "min_mm", s.spike.min_mm);
        s.spike.max_mm = get_or<double>(js, "max_mm", s.spike.max_mm);
    }

    if (j.contains("classifier")) {
        const auto& jc = j.at("classifier");
        s.classifier.slice_len = get_or<std::size_t>(jc, "slice_len", s.classifier.slice_len);
        s.classifier.sigma_multiplier =
            get_or<double>(jc, "sigma_multiplier", s.classifier.sigma_multiplier);
        s.classifier.deformation_threshold_mm =
            get_or<double>(jc, "threshold_w_mm", s.classifier.deformation_threshold_mm);
        s.classifier.confirm_count =
            get_or<std::size_t>(jc, "confirm_count", s.classifier.confirm_count);
        s.classifier.min_sigma_mm = get_or<double>(jc, "sigma_floor_mm", s.classifier.min_sigma_mm);
    }

    if (j.contains("filter")) {
        const auto& jf = j.at("filter");
        s.filter.order = get_or<int>(jf, "order", s.filter.order);
        s.filter.cutoff_hz = get_or<double>(jf, "cutoff_hz", s.filter.cutoff_hz);
    }

    if (j.contains("warning")) {
        const auto& jw = j.at("warning");
        if (jw.contains("horizontal_mm"))
            jw.at("horizontal_mm").get_to(s.warning.horizontal_mm);
        if (jw.contains("vertical_mm")) jw.at("vertical_mm").get_to(s.warning.vertical_mm);
    }

    const auto read_link = [&](const char* key, wire::LinkSimConfig& cfg, std::uint64_t salt) {
        cfg.seed = s.seed ^ salt;  // derived unless the file pins one
        if (!j.contains(key)) return;
        const auto& jl = j.at(key);
        cfg.loss_prob = get_or<double>(jl, "loss", cfg.loss_prob);
        cfg.duplicate_prob = get_or<double>(jl, "duplicate", cfg.duplicate_prob);
        cfg.corrupt_prob = get_or<double>(jl, "corrupt", cfg.corrupt_prob);
        cfg.reorder_window = get_or<std::size_t>(jl, "reorder_window", cfg.reorder_window);
        if (jl.contains("seed")) cfg.seed = jl.at("seed").get<std::uint64_t>();
    };
    read_link("station_link", s.station_link, 0x5747A110ULL);
    read_link("telemetry_link", s.telemetry_link, 0x7E1E0ULL);

    s.validate();
    return s;
}

nlohmann::ordered_json ExperimentScenario::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["seed"] = seed;
    j["duration_s"] = duration_s;
    j["epoch_rate_hz"] = epoch_rate_hz;
    j["constellation"] = constellation;
    j["site"] = {{"lat_deg", site.lat_deg}, {"lon_deg", site.lon_deg},
                 {"height_m", site.height_m}};
    j["site_id"] = site_id;
    j["station_id"] = station_id;
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const auto& t : truth)
        steps.push_back({{"from_s", t.from_s}, {"east", t.east_mm}, {"north", t.north_mm},
                         {"up", t.up_mm}});
    j["baseline_truth_mm"] = steps;
    j["noise_sigma_mm"] = noise_sigma_mm;
    j["spike"] = {{"rate", spike.rate}, {"min_mm", spike.min_mm}, {"max_mm", spike.max_mm}};
    j["elevation_mask_deg"] = elevation_mask_deg;
    j["model_error_sources"] = model_error_sources;
    j["classifier"] = {{"slice_len", classifier.slice_len},
                       {"sigma_multiplier", classifier.sigma_multiplier},
                       {"threshold_w_mm", classifier.deformation_threshold_mm},
                       {"confirm_count", classifier.confirm_count},
                       {"sigma_floor_mm", classifier.min_sigma_mm}};
    j["filter"] = {{"order", filter.order}, {"cutoff_hz", filter.cutoff_hz}};
    j["warning"] = {{"horizontal_mm", warning.horizontal_mm},
                    {"vertical_mm", warning.vertical_mm}};
    const auto link_json = [](const wire::LinkSimConfig& cfg) {
        return nlohmann::ordered_json{{"loss", cfg.loss_prob},
                                      {"duplicate", cfg.duplicate_prob},
                                      {"corrupt", cfg.corrupt_prob},
                                      {"reorder_window", cfg.reorder_window},
                                      {"seed", cfg.seed}};
    };
    j["station_link"] = link_json(station_link);
    j["telemetry_link"] = link_json(telemetry_link);
    return j;
}

void ExperimentScenario::validate() const {
    try {
        if (!(duration_s > 0.0)) throw ScenarioError("duration_s must be > 0");
        if (!(epoch_rate_hz > 0.0)) throw ScenarioError("epoch_rate_hz must be > 0");
        if (constellation != "gnss" && constellation != "gps")
            throw ScenarioError("constellation must be \"gnss\" or \"gps\"");
        if (truth.empty()) throw ScenarioError("baseline_truth_mm must not be empty");
        if (truth.front().from_s != 0.0)
            throw ScenarioError("first baseline_truth_mm step must start at 0 s");
        double prev = -1.0;
        for (const auto& t : truth) {
            if (t.from_s <= prev && &t != &truth.front())
                throw ScenarioError("baseline_truth_mm steps must be strictly ascending");
            prev = t.from_s;
            for (double v : {t.east_mm, t.north_mm, t.up_mm}) {
                if (std::fabs(v) > 1000.0)
                    throw ScenarioError("baseline truth steps must stay within +/-1000 mm");
            }
        }
        if (noise_sigma_mm < 0.0) throw ScenarioError("noise_sigma_mm must be >= 0");
        if (spike.rate < 0.0 || spike.rate >= 1.0)
            throw ScenarioError("spike rate must lie in [0, 1)");
        if (spike.min_mm > spike.max_mm) throw ScenarioError("spike min exceeds max");
        classifier.validate();
        warning.validate();
        station_link.validate();
        telemetry_link.validate();
        // the filter choice is validated by the design itself
        if (filter.order < 1 || filter.order > 20)
            throw ScenarioError("filter order must lie in [1, 20]");
        if (!(filter.cutoff_hz > 0.0) || !(filter.cutoff_hz < epoch_rate_hz / 2.0))
            throw ScenarioError("filter cutoff must lie in (0, rate/2)");
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
}

EnuDisplacement ExperimentScenario::baseline_at(double t_s) const {
    const TruthStep* active = &truth.front();
    for (const auto& step : truth) {
        if (step.from_s <= t_s) active = &step;
    }
    return {active->east_mm, active->north_mm, active->up_mm};
}

EnuDisplacement ExperimentScenario::truth_displacement_at(double t_s) const {
    const EnuDisplacement b = baseline_at(t_s);
    const EnuDisplacement b0 = {truth.front().east_mm, truth.front().north_mm,
                                truth.front().up_mm};
    return {b.east_mm - b0.east_mm, b.north_mm - b0.north_mm, b.up_mm - b0.up_mm};
}

std::int64_t ExperimentScenario::epoch_count() const {
    return static_cast<std::int64_t>(std::llround(duration_s * epoch_rate_hz));
}

std::int64_t ExperimentScenario::epoch_step_ms() const {
    return static_cast<std::int64_t>(std::llround(1000.0 / epoch_rate_hz));
}

}  // namespace geomon::sim
