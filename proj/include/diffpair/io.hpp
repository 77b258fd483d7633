#pragma once

#include <string>

#include "diffpair/diffusion.hpp"
#include "diffpair/trainer.hpp"

namespace diffpair {

// World description: "dims <d>" then one "component <class> <role> <weight>
// <mean...> <variance>" line per component. '#' starts a comment.
MixtureWorld load_world(const std::string& path);
void save_world(const MixtureWorld& world, const std::string& path);

// Delimited dumps. Columns follow the headers written into the files.
void save_dataset(const Dataset& ds, const std::string& path);
void save_bank(const PairBank& bank, const std::string& path);
PairBank load_bank(const std::string& path, int expected_dims);

// Text checkpoint: shape header, standardizer, then each tensor.
void save_checkpoint(const ClassifierModel& model, const std::string& path);
ClassifierModel load_checkpoint(const std::string& path);

std::string format_double(double v);  // shortest round-trip-exact form

}  // namespace diffpair
