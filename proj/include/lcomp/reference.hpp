#pragma once

// Serial reference transforms. They are kept deliberately simple (index
// arithmetic through Tensor::operator(), no fusion, no threads) and serve as
// the oracle for the parallel kernels in lcomp/wavelet.hpp and as the
// baseline in bench/.

#include "lcomp/wavelet.hpp"

namespace lcomp::reference {

template <typename T>
HaarPair<T> haar_analysis_axis(const Tensor<T>& t, Axis axis);

template <typename T>
Tensor<T> haar_synthesis_axis(const Tensor<T>& low, const Tensor<T>& high, Axis axis);

// Axis-sequential wt3d: analysis along `order[0]`, then `order[1]`, then
// `order[2]` on every intermediate band. Any permutation of the three axes
// is accepted; labels always read (time, height, width).
template <typename T>
SubbandSet<T> wt3d_sequential(const Tensor<T>& t,
                              std::array<Axis, 3> order = {Axis::time, Axis::height, Axis::width});

// Direct form: each subband sample is the 2x2x2 block of the input
// correlated with the tensor-product filter and downsampled by 2.
template <typename T>
SubbandSet<T> wt3d_direct(const Tensor<T>& t);

template <typename T>
Tensor<T> iwt3d_sequential(const SubbandSet<T>& s);

template <typename T>
MultiWTSet<T> multi_wt(const Tensor<T>& z, const GroupOrder& group_order = kLexicographicGroupOrder);

template <typename T>
Tensor<T> multi_iwt(const MultiWTSet<T>& m);

} // namespace lcomp::reference
