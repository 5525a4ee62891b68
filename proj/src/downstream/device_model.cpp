#include "steerbench/downstream/device_model.hpp"

#include <fstream>

#include "steerbench/common/error.hpp"

namespace steerbench::downstream {

std::string_view to_string(Device d) { return d == Device::cpu ? "CPU" : "GPU"; }

Device device_from_string(std::string_view name) {
  if (name == "CPU" || name == "cpu") return Device::cpu;
  if (name == "GPU" || name == "gpu") return Device::gpu;
  throw PreconditionError("unknown device '" + std::string(name) + "'");
}

void DeviceModel::check() const {
  if (!(cpu_throughput > 0.0 && gpu_throughput > 0.0 && gpu_transfer_cost > 0.0 && gpu_fixed_overhead > 0.0)) {
    throw PreconditionError("device model constants must be positive");
  }
  if (!(gpu_throughput > cpu_throughput)) throw PreconditionError("gpu_throughput must exceed cpu_throughput");
}

nlohmann::ordered_json DeviceModel::to_json() const {
  return {{"cpu_throughput", cpu_throughput},
          {"gpu_throughput", gpu_throughput},
          {"gpu_transfer_cost", gpu_transfer_cost},
          {"gpu_fixed_overhead", gpu_fixed_overhead}};
}

DeviceModel DeviceModel::from_json(const nlohmann::json& doc) {
  DeviceModel m;
  m.cpu_throughput = doc.value("cpu_throughput", m.cpu_throughput);
  m.gpu_throughput = doc.value("gpu_throughput", m.gpu_throughput);
  m.gpu_transfer_cost = doc.value("gpu_transfer_cost", m.gpu_transfer_cost);
  m.gpu_fixed_overhead = doc.value("gpu_fixed_overhead", m.gpu_fixed_overhead);
  m.check();
  return m;
}

std::vector<Workload> default_workload_grid() {
  std::vector<Workload> grid;
  for (int g = 8; g <= 20; g += 2) {
    for (int b : {10, 16, 22}) grid.push_back({std::uint64_t{1} << g, std::uint64_t{1} << b});
  }
  return grid;
}

double synth_runtime(const FeatureVector& f, const Workload& w, Device device, const DeviceModel& model) {
  if (f.space() != features::FeatureSpace::grewe) throw PreconditionError("synth_runtime needs Grewe features");
  const double work = (f.at("comp") + f.at("mem")) * static_cast<double>(w.global_size);
  if (device == Device::cpu) return work / model.cpu_throughput;
  return model.gpu_fixed_overhead + static_cast<double>(w.transferred_bytes) * model.gpu_transfer_cost +
         work / model.gpu_throughput;
}

Device fastest_device(const FeatureVector& f, const Workload& w, const DeviceModel& model) {
  return synth_runtime(f, w, Device::cpu, model) < synth_runtime(f, w, Device::gpu, model) ? Device::cpu
                                                                                          : Device::gpu;
}

nlohmann::ordered_json LabeledPoint::to_json() const {
  nlohmann::ordered_json doc = {{"features", features.to_json()},
                                {"label", to_string(label)},
                                {"global_size", workload.global_size},
                                {"transferred_bytes", workload.transferred_bytes}};
  if (!kernel.empty()) doc["kernel"] = kernel;
  return doc;
}

LabeledPoint LabeledPoint::from_json(const nlohmann::json& doc) {
  LabeledPoint p;
  p.features = FeatureVector::from_json(doc.at("features"));
  p.label = device_from_string(doc.at("label").get<std::string>());
  p.workload.global_size = doc.at("global_size").get<std::uint64_t>();
  p.workload.transferred_bytes = doc.at("transferred_bytes").get<std::uint64_t>();
  p.kernel = doc.value("kernel", std::string());
  return p;
}

std::vector<LabeledPoint> label(const FeatureVector& f, std::span<const Workload> grid, const DeviceModel& model,
                                const std::string& kernel) {
  if (grid.empty()) throw PreconditionError("workload grid is empty");
  std::vector<LabeledPoint> out;
  out.reserve(grid.size());
  for (const auto& w : grid) out.push_back({f, fastest_device(f, w, model), w, kernel});
  return out;
}

void write_points_jsonl(const std::string& path, std::span<const LabeledPoint> points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write labeled points: " + path);
  for (const auto& p : points) out << p.to_json().dump() << '\n';
}

std::vector<LabeledPoint> read_points_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read labeled points: " + path);
  std::vector<LabeledPoint> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      points.push_back(LabeledPoint::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return points;
}

}  // namespace steerbench::downstream
