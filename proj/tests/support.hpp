#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "mamprop/data.hpp"

namespace testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(MAMPROP_SOURCE_DIR) / rel;
}

inline std::shared_ptr<const mamprop::MaterialRegistry> bundled_registry() {
  static auto reg = std::make_shared<const mamprop::MaterialRegistry>(
      mamprop::load_materials(source_path("data/materials.csv")));
  return reg;
}

inline const mamprop::ElementTable& bundled_elements() {
  static const mamprop::ElementTable table =
      mamprop::load_elements(source_path("data/elements.csv"), bundled_registry().get());
  return table;
}

inline const mamprop::Dataset& bundled_records() {
  static const mamprop::Dataset ds =
      mamprop::load_dataset(source_path("data/records.csv"), bundled_registry());
  return ds;
}

inline const std::string kRecordHeader =
    "material,process,subprocess,machine,orientation,post_processing,surface_condition,"
    "beam_power,scan_speed,layer_thickness,beam_diameter,ys,uts,e_mod,elongation,hv,hrc,rz,"
    "source\n";

// Per-test scratch directory, removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("mamprop_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace testing
