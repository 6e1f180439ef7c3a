#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lfc/deconv.hpp"
#include "lfc/forward.hpp"

namespace lfc {

// Robustness/attack sweep on one scene: baseline decryption with the
// correct key, partial occlusion of the ciphertext image, and decryption
// with a perturbed key. Correlations are reported per reference plane
// (planes with constant reference content are skipped).
struct AttackSettings {
    std::vector<double> occlusion_fractions{0.25, 0.375};
    std::vector<double> perturb_fractions{0.05};
    DeconvSettings deconv;
    EncryptOptions encrypt;
    OccludeMode occlude_mode = OccludeMode::corner;
    uint64_t occlude_seed = 7;
    uint64_t perturb_seed = 99;
    int max_shift = 0;  // correlation search radius, 0 = default
};

struct AttackEntry {
    std::string name;  // "baseline", "occlusion_25.0", "perturb_5.0"
    double occlusion_fraction = 0.0;
    double perturb_fraction = 0.0;
    std::vector<int> plane_index;  // reference planes that were scored
    std::vector<double> plane_c;
    std::vector<int> plane_dy, plane_dx;
    Volume reconstruction;
};

struct AttackReport {
    LightFieldImage image;  // the unoccluded ciphertext
    std::vector<AttackEntry> entries;
};

AttackReport run_attack_suite(const Volume& scene, const PsfKey& key,
                              const AttackSettings& settings);

}  // namespace lfc
