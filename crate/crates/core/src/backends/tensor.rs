use serde::Serialize;
use serde_json::Value as Json;

use crate::error::{Error, Result};

/// Values a diagram can be evaluated into: a commutative semiring.
pub trait Scalar: Copy + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn from_json(v: &Json) -> Option<Self>;
    fn to_json(self) -> Json;
}

impl Scalar for bool {
    fn zero() -> Self {
        false
    }
    fn one() -> Self {
        true
    }
    fn add(self, other: Self) -> Self {
        self || other
    }
    fn mul(self, other: Self) -> Self {
        self && other
    }
    fn from_json(v: &Json) -> Option<Self> {
        match v {
            Json::Bool(b) => Some(*b),
            Json::Number(n) => match n.as_u64()? {
                0 => Some(false),
                1 => Some(true),
                _ => None,
            },
            _ => None,
        }
    }
    fn to_json(self) -> Json {
        Json::Bool(self)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn from_json(v: &Json) -> Option<Self> {
        v.as_f64()
    }
    fn to_json(self) -> Json {
        serde_json::Number::from_f64(self).map_or(Json::Null, Json::Number)
    }
}

/// Dense tensor, row-major, one axis per wire from left to right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tensor<T> {
    pub dims: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Tensor { dims, data: vec![T::zero(); n] }
    }

    pub fn scalar(x: T) -> Self {
        Tensor { dims: Vec::new(), data: vec![x] }
    }

    /// Entry `1` wherever `f` holds of the multi-index.
    pub fn indicator(dims: Vec<usize>, f: impl Fn(&[usize]) -> bool) -> Self {
        let mut t = Self::zeros(dims);
        let mut idx = vec![0; t.dims.len()];
        for k in 0..t.data.len() {
            if f(&idx) {
                t.data[k] = T::one();
            }
            increment(&mut idx, &t.dims);
        }
        t
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], x: T) {
        let k = self.offset(idx);
        self.data[k] = x;
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (i, d)| acc * d + i)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Tensor { dims: self.dims.clone(), data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// The value of a tensor with no axes.
    pub fn as_scalar(&self) -> Option<T> {
        self.dims.is_empty().then(|| self.data[0])
    }

    /// Reads a nested JSON array with the given axis lengths. A bare
    /// number stands for a tensor with no axes.
    pub fn from_json(v: &Json, dims: &[usize]) -> Result<Self> {
        let mut data = Vec::new();
        read_nested(v, dims, &mut data)?;
        Ok(Tensor { dims: dims.to_vec(), data })
    }

    pub fn to_json(&self) -> Json {
        fn go<T: Scalar>(data: &[T], dims: &[usize]) -> Json {
            match dims.split_first() {
                None => data[0].to_json(),
                Some((&d, rest)) => {
                    let stride: usize = rest.iter().product();
                    Json::Array((0..d).map(|i| go(&data[i * stride..(i + 1) * stride], rest)).collect())
                }
            }
        }
        go(&self.data, &self.dims)
    }

    /// Contracts `gen` into axes `at..at + k` of `self`, where `k` is the
    /// number of input axes of `gen`.
    pub(crate) fn apply(&self, at: usize, k: usize, gen: &Tensor<T>) -> Tensor<T> {
        let prefix: usize = self.dims[..at].iter().product();
        let ksize: usize = self.dims[at..at + k].iter().product();
        let rsize: usize = self.dims[at + k..].iter().product();
        let out_dims = &gen.dims[k..];
        let osize: usize = out_dims.iter().product();
        let mut dims = self.dims[..at].to_vec();
        dims.extend_from_slice(out_dims);
        dims.extend_from_slice(&self.dims[at + k..]);
        let mut out = Tensor::<T>::zeros(dims);
        for p in 0..prefix {
            for ki in 0..ksize {
                for r in 0..rsize {
                    let s = self.data[(p * ksize + ki) * rsize + r];
                    if s == T::zero() {
                        continue;
                    }
                    for o in 0..osize {
                        let g = gen.data[ki * osize + o];
                        let slot = &mut out.data[(p * osize + o) * rsize + r];
                        *slot = slot.add(s.mul(g));
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

fn read_nested<T: Scalar>(v: &Json, dims: &[usize], out: &mut Vec<T>) -> Result<()> {
    match dims.split_first() {
        None => {
            let v = match v {
                Json::Array(a) if a.len() == 1 => &a[0],
                v => v,
            };
            out.push(T::from_json(v).ok_or_else(|| Error::Shape(format!("expected a tensor entry, found {v}")))?);
            Ok(())
        }
        Some((&d, rest)) => match v {
            Json::Array(a) if a.len() == d => a.iter().try_for_each(|x| read_nested(x, rest, out)),
            _ => Err(Error::Shape(format!("expected an array of length {d}, found {v}"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let v: Json = serde_json::json!([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        let t = Tensor::<f64>::from_json(&v, &[2, 3]).unwrap();
        assert_eq!(t.get(&[1, 0]), 4.0);
        assert_eq!(t.to_json(), v);
        assert!(Tensor::<f64>::from_json(&v, &[3, 2]).is_err());
        assert_eq!(Tensor::<bool>::from_json(&serde_json::json!(1), &[]).unwrap().as_scalar(), Some(true));
    }

    #[test]
    fn apply_is_matrix_product() {
        // v (1 x 2) then M (2 x 2)
        let v = Tensor { dims: vec![2], data: vec![1.0, 2.0] };
        let m = Tensor { dims: vec![2, 2], data: vec![1.0, 2.0, 3.0, 4.0] };
        let out = v.apply(0, 1, &m);
        assert_eq!(out.data, vec![1.0 * 1.0 + 2.0 * 3.0, 1.0 * 2.0 + 2.0 * 4.0]);
    }
}
