//! Geometric rounding of scaled values and configuration (input) vectors.
//!
//! With error parameter `k`, a value at most `1/k` is *small* and kept as is.
//! Larger values are *big* and snapped to the grid `q_t = (1/k)(1+1/k)^t`:
//! upwards for Max-Min (`(q_{t-1}, q_t] -> q_t`) and downwards for Min-Max
//! (`[q_t, q_{t+1}) -> q_t`). Either way there are `C` big categories, numbered
//! `1..=C` in input vectors.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{Canonical, Mode, Subgraph};
use crate::value::{self, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::MaxMin => Direction::Up,
            Mode::MinMax => Direction::Down,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundingScheme {
    k: u32,
    direction: Direction,
    categories: usize,
    /// `grid[t] = q_t` for `t = 0..=C`.
    grid: Vec<Value>,
}

/// Smallest `C` with `(1 + 1/k)^C >= k`, i.e. `ceil(log k / log(1 + 1/k))`.
pub fn category_count(k: u32) -> usize {
    let kb = BigInt::from(k);
    let step = BigInt::from(k + 1);
    // (k+1)^C >= k^(C+1)
    let mut lhs = BigInt::one();
    let mut rhs = kb.clone();
    let mut c = 0;
    while lhs < rhs {
        lhs *= &step;
        rhs *= &kb;
        c += 1;
    }
    c
}

impl RoundingScheme {
    pub fn new(k: u32, direction: Direction) -> Result<Self> {
        if k < 4 {
            return Err(Error::BadK(k));
        }
        let categories = category_count(k);
        let kb = BigInt::from(k);
        let mut grid = Vec::with_capacity(categories + 1);
        let mut q = BigRational::new(BigInt::one(), kb.clone());
        let factor = BigRational::new(&kb + 1, kb);
        for _ in 0..=categories {
            grid.push(q.clone());
            q *= &factor;
        }
        Ok(RoundingScheme {
            k,
            direction,
            categories,
            grid,
        })
    }

    pub fn for_mode(k: u32, mode: Mode) -> Result<Self> {
        Self::new(k, Direction::for_mode(mode))
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Number of big categories `C`.
    pub fn categories(&self) -> usize {
        self.categories
    }

    /// `q_t` for `t = 0..=C`.
    pub fn grid(&self) -> &[Value] {
        &self.grid
    }

    /// `1/k`.
    pub fn unit(&self) -> Value {
        self.grid[0].clone()
    }

    /// Rounded value of big category `c` (`1..=C`).
    pub fn category_value(&self, c: usize) -> &Value {
        assert!((1..=self.categories).contains(&c));
        match self.direction {
            Direction::Up => &self.grid[c],
            Direction::Down => &self.grid[c - 1],
        }
    }

    /// Classifies a value in `(0, 1]`.
    pub fn classify(&self, v: &Value) -> Result<ItemClass> {
        if *v <= Value::zero() || *v > Value::one() {
            return Err(Error::ValueOutOfRange(value::format_value(v)));
        }
        if *v <= self.grid[0] {
            return Ok(ItemClass::Small);
        }
        let c = match self.direction {
            // first t with v <= q_t; t >= 1 since v > q_0
            Direction::Up => self.grid.partition_point(|q| q < v),
            // last t with q_t <= v, shifted to 1-based
            Direction::Down => self.grid.partition_point(|q| q <= v),
        };
        debug_assert!((1..=self.categories).contains(&c));
        Ok(ItemClass::Big(c))
    }

    pub fn round(&self, v: &Value) -> Result<Value> {
        Ok(match self.classify(v)? {
            ItemClass::Small => v.clone(),
            ItemClass::Big(c) => self.category_value(c).clone(),
        })
    }

    /// Small-unit coordinate for a total small value.
    pub fn small_units(&self, total: &Value) -> u32 {
        let scaled = total * BigRational::from_integer(BigInt::from(self.k));
        let units = match self.direction {
            // total in ((u-1)/k, u/k]
            Direction::Up => scaled.ceil(),
            // total in [u/k, (u+1)/k)
            Direction::Down => scaled.floor(),
        };
        u32::try_from(units.to_integer()).expect("small units fit in u32")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItemClass {
    Small,
    /// Big category `1..=C`.
    Big(usize),
}

impl ItemClass {
    /// Coordinate in an input vector: 0 for small, `c` for category `c`.
    pub fn coordinate(self) -> usize {
        match self {
            ItemClass::Small => 0,
            ItemClass::Big(c) => c,
        }
    }
}

/// Configuration vector `(small units, count of category 1, ..., count of category C)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputVector(pub Vec<u32>);

impl InputVector {
    pub fn zero(categories: usize) -> Self {
        InputVector(vec![0; categories + 1])
    }

    pub fn small(&self) -> u32 {
        self.0[0]
    }

    pub fn big(&self, c: usize) -> u32 {
        self.0[c]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &InputVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn partial_cmp_componentwise(&self, other: &InputVector) -> Option<Ordering> {
        match (self.le(other), other.le(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    /// Number of vectors `v` with `0 <= v <= self`.
    pub fn dominated_count(&self) -> u128 {
        self.0.iter().map(|&x| x as u128 + 1).product()
    }
}

impl fmt::Display for InputVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// A canonical instance with values in `(0, 1]` after rounding.
#[derive(Clone, Debug)]
pub struct RoundedInstance {
    canon: Canonical,
    unrounded: Vec<Value>,
    scheme: RoundingScheme,
    classes: Vec<ItemClass>,
    /// `by_class[c]`: items of coordinate `c`, in item order.
    by_class: Vec<Vec<usize>>,
    /// Prefix sums of small values along `by_class[0]`.
    small_prefix: Vec<Value>,
    full: InputVector,
}

pub fn round_instance(canon: &Canonical, scheme: &RoundingScheme) -> Result<RoundedInstance> {
    let mut classes = Vec::with_capacity(canon.m());
    let mut rounded = Vec::with_capacity(canon.m());
    for it in canon.items() {
        let class = scheme.classify(&it.value)?;
        classes.push(class);
        rounded.push(match class {
            ItemClass::Small => it.value.clone(),
            ItemClass::Big(c) => scheme.category_value(c).clone(),
        });
    }
    let mut by_class = vec![Vec::new(); scheme.categories() + 1];
    for (i, class) in classes.iter().enumerate() {
        by_class[class.coordinate()].push(i);
    }
    let mut small_prefix = vec![value::zero()];
    for &i in &by_class[0] {
        let next = small_prefix.last().unwrap() + &rounded[i];
        small_prefix.push(next);
    }
    let unrounded = canon.items().iter().map(|it| it.value.clone()).collect();
    let canon = canon.with_values(rounded);
    let mut r = RoundedInstance {
        canon,
        unrounded,
        scheme: scheme.clone(),
        classes,
        by_class,
        small_prefix,
        full: InputVector::zero(scheme.categories()),
    };
    r.full = r.vector_of(0..r.canon.m());
    Ok(r)
}

impl RoundedInstance {
    /// The instance with rounded values.
    pub fn canonical(&self) -> &Canonical {
        &self.canon
    }

    pub fn scheme(&self) -> &RoundingScheme {
        &self.scheme
    }

    pub fn mode(&self) -> Mode {
        self.canon.mode()
    }

    pub fn n(&self) -> usize {
        self.canon.n()
    }

    pub fn m(&self) -> usize {
        self.canon.m()
    }

    pub fn class(&self, i: usize) -> ItemClass {
        self.classes[i]
    }

    pub fn value(&self, i: usize) -> &Value {
        self.canon.value(i)
    }

    pub fn unrounded(&self, i: usize) -> &Value {
        &self.unrounded[i]
    }

    pub fn values(&self) -> Vec<Value> {
        self.canon
            .items()
            .iter()
            .map(|it| it.value.clone())
            .collect()
    }

    /// Items of coordinate `c` (0 = small) in item order.
    pub fn class_items(&self, c: usize) -> &[usize] {
        &self.by_class[c]
    }

    /// Total value of the first `len` small items.
    pub fn small_prefix(&self, len: usize) -> &Value {
        &self.small_prefix[len]
    }

    /// Input vector of the whole rounded instance.
    pub fn full_vector(&self) -> &InputVector {
        &self.full
    }

    pub fn vector_of<I: IntoIterator<Item = usize>>(&self, items: I) -> InputVector {
        let mut v = InputVector::zero(self.scheme.categories());
        let mut small = value::zero();
        for i in items {
            match self.classes[i] {
                ItemClass::Small => small += self.value(i),
                ItemClass::Big(c) => v.0[c] += 1,
            }
        }
        v.0[0] = self.scheme.small_units(&small);
        v
    }

    pub fn value_of<'a, I: IntoIterator<Item = &'a usize>>(&self, items: I) -> Value {
        value::sum(items.into_iter().map(|&i| self.value(i)))
    }
}

/// Input vector of a subgraph of `rounded.canonical()`.
pub fn input_vector(sub: &Subgraph<'_>, rounded: &RoundedInstance) -> InputVector {
    rounded.vector_of(sub.items().iter().copied())
}
