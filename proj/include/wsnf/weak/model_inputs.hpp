#ifndef WSNF_WEAK_MODEL_INPUTS_HPP
#define WSNF_WEAK_MODEL_INPUTS_HPP

#include "wsnf/weak/model.hpp"

#include <span>

namespace wsnf::weak {

/// Flow inputs [x_i; table[lfs_i]] recorded on `tape`. Training and
/// evaluation both go through these, so their per-pair losses agree exactly.
ad::Var<double> standard_inputs(ad::Tape<double>& tape, const WeakModel& model, const MatrixXd& x,
                                std::span<const Index> lfs, const char* table = kPositiveTable);

/// Flow inputs [x_i; alphas_i * positive].
ad::Var<double> mixed_inputs(ad::Tape<double>& tape, const WeakModel& model, const MatrixXd& x,
                             const MatrixXd& alphas);

/// Rejects mixing rows that are not probability vectors over the LFs
/// (tolerance 1e-9 on the sum).
void check_mixing_weights(const MatrixXd& alphas, Index num_lfs);

}  // namespace wsnf::weak

#endif  // WSNF_WEAK_MODEL_INPUTS_HPP
