#ifndef PFZ_LINALG_HPP
#define PFZ_LINALG_HPP

#include <vector>

#include "pfz/types.hpp"

namespace pfz::linalg
{
  //! dense row-major complex matrix for the small (q <= ~6) systems used here
  class CMatrix
  {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CMatrix adjoint() const;
    CMatrix operator*(const CMatrix& b) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Complex> a_;
  };

  //! determinant by LU with partial pivoting
  Complex determinant(CMatrix a);

  //! inverse by Gauss-Jordan with partial pivoting; throws SingularityError
  CMatrix inverse(CMatrix a);

  //! eigenvalues (ascending) of a Hermitian matrix by cyclic complex Jacobi rotations
  std::vector<double> hermitian_eigenvalues(CMatrix h, double tol = 1e-15, int max_sweeps = 100);

  //! singular values (descending) from the eigenvalues of A A^+
  std::vector<double> singular_values(const CMatrix& a);

  //! largest singular value
  double spectral_norm(const CMatrix& a);
}

#endif // PFZ_LINALG_HPP
