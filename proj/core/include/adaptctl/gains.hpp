#pragma once

#include <complex>
#include <vector>

#include "adaptctl/types.hpp"

namespace adaptctl {

// Kg = -(C Am^-1 B)^-1; scalar kg = -1/(C Am^-1 B) falls out as the 1x1 case.
Matrix feedforward_gain(const Matrix& Am, const Matrix& B, const Matrix& C);

// Monic real polynomial with the given roots (conjugates must pair up).
Eigen::VectorXd poly_from_poles(const std::vector<std::complex<double>>& p);

// Companion-form (A, B) for a SISO chain with the given characteristic poles:
// A = [[0, I], [-a_n ... -a_1]], B = e_n.
Matrix companion_from_poles(const std::vector<std::complex<double>>& p);

// Block double-integrator pole placement: state [q; qdot] with m channels,
// one conjugate pair per channel. Returns the 2m x 2m closed matrix
// [[0, I], [-K0, -K1]] with diagonal K0, K1.
Matrix block_second_order_am(
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>&
        pole_pairs);

// Real block-diagonal matrix realizing the given pole set (real poles as 1x1
// blocks, conjugate pairs as [[re, im], [-im, re]]), ordered by descending
// real part then ascending |imag|.
Matrix real_block_diag_from_poles(std::vector<std::complex<double>> p);

// Observer gain for the block double-integrator skeleton A=[[0,I],[0,0]],
// C=[I,0]: per-channel pole pairs give L = [L1; L2] with diagonal blocks.
Matrix block_observer_gain(
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>&
        pole_pairs);

}  // namespace adaptctl
