#pragma once

#include <map>
#include <string>

namespace rhlab {

/// Empirical VC-vs-DB flip behavior a vendor exhibits.
/// OVERLAP: VC and DB curves coincide. REDUCED: VC trails DB.
/// INVERTED: VC exceeds DB.
enum class BehaviorClass { Overlap, Reduced, Inverted };

const char* to_string(BehaviorClass cls);
BehaviorClass behavior_class_from(const std::string& name);

/// Lognormal per-cell flip-threshold distribution, in disturbance units.
struct LognormalDist {
    double median = 1.0e7;
    double sigma = 1.0;
};

/// Disturbance parameters for one manufacturer.
/// A hammered neighbor contributes w_diff per activation where its stored bit
/// differs from the cell's, w_same where it matches.
struct VendorProfile {
    std::string name;
    double w_diff = 1.0;
    double w_same = 1.0;
    LognormalDist threshold_dist;
    double noise_amp = 0.0;  ///< relative per-trial threshold jitter, 0..0.5
    BehaviorClass behavior_class = BehaviorClass::Overlap;

    /// Throws a config error when fields are inconsistent (weight signs,
    /// class/weight mismatch, jitter range).
    void validate() const;
};

/// The seven built-in manufacturer profiles, keyed by name (mf-A .. mf-G).
/// Weights and threshold parameters come from the calibration search against
/// the reference device; see tools and README for how to re-derive them.
const std::map<std::string, VendorProfile>& builtin_profiles();

/// Plain-text profile file: `key = value` lines with keys name, class,
/// w_diff, w_same, threshold_median, threshold_sigma, noise_amp.
VendorProfile load_profile(const std::string& path);
void save_profile(const VendorProfile& profile, const std::string& path);

/// Built-in name first, then a profile file path. Unknown name with no such
/// file is an input error.
VendorProfile resolve_profile(const std::string& name_or_path);

}  // namespace rhlab
