#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerbench/features/feature_vector.hpp"

namespace steerbench::downstream {

using features::FeatureVector;

enum class Device { cpu, gpu };
std::string_view to_string(Device d);
Device device_from_string(std::string_view name);

// Analytic stand-in for measured execution times.
struct DeviceModel {
  double cpu_throughput = 1e8;      // ops/s
  double gpu_throughput = 1e9;      // ops/s
  double gpu_transfer_cost = 1e-8;  // s/byte
  double gpu_fixed_overhead = 1e-3; // s

  void check() const;
  nlohmann::ordered_json to_json() const;
  static DeviceModel from_json(const nlohmann::json& doc);
};

struct Workload {
  std::uint64_t global_size = 1;
  std::uint64_t transferred_bytes = 1;
  bool operator==(const Workload&) const = default;
};

// global_size in {2^8, 2^10, ..., 2^20} x transferred_bytes in {2^10, 2^16, 2^22}.
std::vector<Workload> default_workload_grid();

// work = (comp + mem) * global_size
// cpu  = work / cpu_throughput
// gpu  = overhead + bytes * transfer_cost + work / gpu_throughput
// Throws PreconditionError unless `f` is a Grewe vector.
double synth_runtime(const FeatureVector& f, const Workload& w, Device device, const DeviceModel& model);

// Faster device; exact ties go to the GPU.
Device fastest_device(const FeatureVector& f, const Workload& w, const DeviceModel& model);

struct LabeledPoint {
  FeatureVector features{features::FeatureSpace::grewe};
  Device label = Device::gpu;
  Workload workload;
  std::string kernel;  // source text when known

  nlohmann::ordered_json to_json() const;
  static LabeledPoint from_json(const nlohmann::json& doc);
};

// One point per workload. Throws PreconditionError on an empty grid.
std::vector<LabeledPoint> label(const FeatureVector& f, std::span<const Workload> grid, const DeviceModel& model,
                                const std::string& kernel = {});

void write_points_jsonl(const std::string& path, std::span<const LabeledPoint> points);
std::vector<LabeledPoint> read_points_jsonl(const std::string& path);

}  // namespace steerbench::downstream
