#include <algorithm>
#include <cctype>

#include "mamprop/data.hpp"

namespace mamprop {

namespace {

std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) continue;
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

}  // namespace

std::string PostProcessing::label() const {
  switch (kind) {
    case Kind::as_built: return "as_built";
    case Kind::ht: return "HT";
    case Kind::hip: return "HIP";
    case Kind::sr: return "SR";
    case Kind::other: return tag;
  }
  return tag;
}

std::string_view to_string(Process p) { return p == Process::pbf ? "PBF" : "DED"; }

std::string_view to_string(Subprocess s) {
  switch (s) {
    case Subprocess::l_pbf: return "L-PBF";
    case Subprocess::e_pbf: return "E-PBF";
    case Subprocess::l_ded: return "L-DED";
    case Subprocess::e_ded: return "E-DED";
    case Subprocess::arc_ded: return "Arc-DED";
    case Subprocess::wire_l_ded: return "Wire-L-DED";
  }
  return "?";
}

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::horizontal: return "horizontal";
    case Orientation::vertical: return "vertical";
    case Orientation::deg45: return "deg45";
  }
  return "?";
}

std::string_view to_string(SurfaceCondition s) {
  switch (s) {
    case SurfaceCondition::as_built: return "as_built";
    case SurfaceCondition::bead_blasted: return "bead_blasted";
    case SurfaceCondition::shot_peened: return "shot_peened";
    case SurfaceCondition::corundum_blasted: return "corundum_blasted";
  }
  return "?";
}

std::string_view to_string(LabelKind k) {
  switch (k) {
    case LabelKind::ys: return "ys";
    case LabelKind::uts: return "uts";
    case LabelKind::e_mod: return "e_mod";
    case LabelKind::elongation: return "elongation";
    case LabelKind::hv: return "hv";
    case LabelKind::hrc: return "hrc";
    case LabelKind::rz: return "rz";
  }
  return "?";
}

std::string_view label_unit(LabelKind k) {
  switch (k) {
    case LabelKind::ys:
    case LabelKind::uts: return "MPa";
    case LabelKind::e_mod: return "GPa";
    case LabelKind::elongation: return "%";
    case LabelKind::hv: return "HV";
    case LabelKind::hrc: return "HRC";
    case LabelKind::rz: return "um";
  }
  return "";
}

std::string_view label_title(LabelKind k) {
  switch (k) {
    case LabelKind::ys: return "Yield strength";
    case LabelKind::uts: return "Ultimate tensile strength";
    case LabelKind::e_mod: return "Elastic modulus";
    case LabelKind::elongation: return "Elongation at break";
    case LabelKind::hv: return "Hardness (Vickers)";
    case LabelKind::hrc: return "Hardness (Rockwell)";
    case LabelKind::rz: return "Mean roughness depth (Rz)";
  }
  return "";
}

std::optional<Process> parse_process(std::string_view s) {
  const auto f = fold(s);
  if (f == "pbf") return Process::pbf;
  if (f == "ded") return Process::ded;
  return std::nullopt;
}

std::optional<Subprocess> parse_subprocess(std::string_view s) {
  const auto f = fold(s);
  if (f == "lpbf") return Subprocess::l_pbf;
  if (f == "epbf") return Subprocess::e_pbf;
  if (f == "lded") return Subprocess::l_ded;
  if (f == "eded") return Subprocess::e_ded;
  if (f == "arcded") return Subprocess::arc_ded;
  if (f == "wirelded") return Subprocess::wire_l_ded;
  return std::nullopt;
}

std::optional<Orientation> parse_orientation(std::string_view s) {
  const auto f = fold(s);
  if (f == "xy" || f == "horizontal" || f == "h") return Orientation::horizontal;
  if (f == "z" || f == "vertical" || f == "v") return Orientation::vertical;
  if (f == "45" || f == "deg45" || f == "45deg" || f == "45degree" || f == "45°") {
    return Orientation::deg45;
  }
  return std::nullopt;
}

std::optional<SurfaceCondition> parse_surface(std::string_view s) {
  const auto f = fold(s);
  if (f == "asbuilt") return SurfaceCondition::as_built;
  if (f == "beadblasted" || f == "beadblasting") return SurfaceCondition::bead_blasted;
  if (f == "shotpeened" || f == "shotpeening") return SurfaceCondition::shot_peened;
  if (f == "corundumblasted" || f == "corundumblasting") return SurfaceCondition::corundum_blasted;
  return std::nullopt;
}

std::optional<PostProcessing::Kind> parse_post_processing_kind(std::string_view s) {
  const auto f = fold(s);
  if (f == "asbuilt" || f == "ab" || f == "none") return PostProcessing::Kind::as_built;
  if (f == "ht" || f == "heattreated" || f == "heattreatment") return PostProcessing::Kind::ht;
  if (f == "hip") return PostProcessing::Kind::hip;
  if (f == "sr" || f == "stressrelieved" || f == "stressrelief") return PostProcessing::Kind::sr;
  return std::nullopt;
}

std::optional<LabelKind> parse_label(std::string_view s) {
  const auto f = fold(s);
  if (f == "ys" || f == "yieldstrength") return LabelKind::ys;
  if (f == "uts" || f == "ultimatetensilestrength") return LabelKind::uts;
  if (f == "e" || f == "emod" || f == "elasticmodulus") return LabelKind::e_mod;
  if (f == "elongation" || f == "elong") return LabelKind::elongation;
  if (f == "hv" || f == "vickers") return LabelKind::hv;
  if (f == "hrc" || f == "rockwell") return LabelKind::hrc;
  if (f == "rz" || f == "roughness") return LabelKind::rz;
  return std::nullopt;
}

Process process_of(Subprocess s) {
  return (s == Subprocess::l_pbf || s == Subprocess::e_pbf) ? Process::pbf : Process::ded;
}

}  // namespace mamprop
