/// Dense row-major tensor holding `f64` values.
///
/// Most of the crate works with 2-D matrices; convolution kernels are the
/// one 3-D case. Shape checks panic: a bad shape is a bug in the caller,
/// not a recoverable condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Self {
        let n: usize = shape.iter().product();
        assert_eq!(
            n,
            data.len(),
            "tensor data length {} does not match shape {:?}",
            data.len(),
            shape
        );
        assert!(
            shape.iter().all(|&e| e > 0),
            "zero extent in shape {:?}",
            shape
        );
        Tensor { shape, data }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n: usize = shape.iter().product();
        assert!(
            shape.iter().all(|&e| e > 0),
            "zero extent in shape {:?}",
            shape
        );
        Tensor {
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn scalar(v: f64) -> Self {
        Tensor {
            shape: vec![1, 1],
            data: vec![v],
        }
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        Tensor::new(vec![rows, cols], data)
    }

    /// Build a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Tensor::new(vec![rows.len(), cols], data)
    }

    pub fn row_vector(data: Vec<f64>) -> Self {
        Tensor::new(vec![1, data.len()], data)
    }

    pub fn col_vector(data: Vec<f64>) -> Self {
        Tensor::new(vec![data.len(), 1], data)
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Tensor::zeros(vec![n, n]);
        for i in 0..n {
            t.data[i * n + i] = 1.0;
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn is_matrix(&self) -> bool {
        self.shape.len() == 2
    }

    pub fn rows(&self) -> usize {
        assert!(
            self.is_matrix(),
            "rows() on non-matrix shape {:?}",
            self.shape
        );
        self.shape[0]
    }

    pub fn cols(&self) -> usize {
        assert!(
            self.is_matrix(),
            "cols() on non-matrix shape {:?}",
            self.shape
        );
        self.shape[1]
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let cols = self.cols();
        self.data[r * cols + c] = v;
    }

    /// Scalar tensors (shape 1x1) unwrap to their single value.
    pub fn scalar_value(&self) -> f64 {
        assert_eq!(self.numel(), 1, "scalar_value() on shape {:?}", self.shape);
        self.data[0]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let cols = self.cols();
        &self.data[r * cols..(r + 1) * cols]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Plain (non-differentiable) transpose of a matrix.
    pub fn transposed(&self) -> Tensor {
        let (m, n) = (self.rows(), self.cols());
        let mut out = Tensor::zeros(vec![n, m]);
        for i in 0..m {
            for j in 0..n {
                out.data[j * m + i] = self.data[i * n + j];
            }
        }
        out
    }
}

/// C = A * B for row-major matrices. Panics on inner-extent mismatch.
pub fn matmul_raw(a: &Tensor, b: &Tensor) -> Tensor {
    let (m, k) = (a.rows(), a.cols());
    let (k2, n) = (b.rows(), b.cols());
    assert_eq!(k, k2, "matmul inner extents {}x{} . {}x{}", m, k, k2, n);
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for p in 0..k {
            let av = a.data[i * k + p];
            if av == 0.0 {
                continue;
            }
            let brow = &b.data[p * n..(p + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                orow[j] += av * brow[j];
            }
        }
    }
    Tensor::new(vec![m, n], out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity() {
        let i2 = Tensor::identity(2);
        let b = Tensor::matrix(2, 2, vec![3.0, 4.0, 5.0, 6.0]);
        assert_eq!(matmul_raw(&i2, &b), b);
    }

    #[test]
    fn matmul_hand() {
        let a = Tensor::matrix(1, 2, vec![1.0, 2.0]);
        let b = Tensor::matrix(2, 1, vec![3.0, 4.0]);
        let c = matmul_raw(&a, &b);
        assert_eq!(c.data(), &[11.0]);
    }

    #[test]
    #[should_panic(expected = "matmul inner extents")]
    fn matmul_shape_mismatch_panics() {
        let a = Tensor::matrix(1, 3, vec![1.0; 3]);
        let b = Tensor::matrix(2, 1, vec![1.0; 2]);
        matmul_raw(&a, &b);
    }

    #[test]
    fn transpose_roundtrip() {
        let a = Tensor::matrix(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(a.transposed().transposed(), a);
    }
}
