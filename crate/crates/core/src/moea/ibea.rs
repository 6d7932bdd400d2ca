use super::{check_len, common_dim, MoeaError};
use crate::scalar::Scalar;

/// Fitness scaling factor of the original IBEA recipe.
pub const DEFAULT_KAPPA: f64 = 0.05;

/// Additive epsilon indicator under maximization: the smallest shift that,
/// added to every objective of `a`, makes it weakly dominate `b`.
pub fn eps_indicator<T: Scalar>(a: &[T], b: &[T]) -> Result<T, MoeaError> {
    check_len(a.len(), b.len())?;
    Ok(eps_unchecked(a, b))
}

fn eps_unchecked<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| y - x)
        .fold(T::neg_infinity(), T::max)
}

/// Indicator-based fitness with incremental removal.
///
/// `fitness(x) = sum over living y != x of -exp(-I(y, x) / (kappa * c))` where
/// `c` is the largest absolute indicator value over the initial set. Removing
/// an individual adds its term back to everyone still alive.
#[derive(Debug, Clone)]
pub struct IbeaFitness<T> {
    indicator: Vec<Vec<T>>,
    scale: T,
    kappa: T,
    alive: Vec<bool>,
    fitness: Vec<T>,
}

impl<T: Scalar> IbeaFitness<T> {
    pub fn new<P: AsRef<[T]>>(points: &[P], kappa: T) -> Result<Self, MoeaError> {
        common_dim(points)?;
        if !(kappa > T::zero()) {
            return Err(MoeaError::InvalidParameter(format!("kappa must be > 0, got {kappa}")));
        }
        let n = points.len();
        let mut indicator = vec![vec![T::zero(); n]; n];
        let mut scale = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let v = eps_unchecked(points[i].as_ref(), points[j].as_ref());
                    indicator[i][j] = v;
                    scale = scale.max(v.abs());
                }
            }
        }
        let mut state = Self {
            indicator,
            scale,
            kappa,
            alive: vec![true; n],
            fitness: vec![T::zero(); n],
        };
        for x in 0..n {
            state.fitness[x] = (0..n).filter(|&y| y != x).map(|y| -state.term(y, x)).fold(T::zero(), |a, b| a + b);
        }
        Ok(state)
    }

    /// `exp(-I(y, x) / (kappa * c))`; a zero scale means every indicator is
    /// zero, so the exponent is taken as zero.
    fn term(&self, y: usize, x: usize) -> T {
        if self.scale > T::zero() {
            (-self.indicator[y][x] / (self.kappa * self.scale)).exp()
        } else {
            T::one()
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.scale == T::zero()
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn fitness(&self, i: usize) -> T {
        self.fitness[i]
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    /// Living individual with the lowest fitness; among equals the highest
    /// index goes first so lower indices survive.
    pub fn worst(&self) -> Option<usize> {
        let mut worst: Option<usize> = None;
        for i in (0..self.alive.len()).filter(|&i| self.alive[i]) {
            match worst {
                Some(w) if self.fitness[i] > self.fitness[w] => {}
                _ => worst = Some(i),
            }
        }
        worst
    }

    pub fn remove(&mut self, victim: usize) {
        if !self.alive[victim] {
            return;
        }
        self.alive[victim] = false;
        for x in 0..self.alive.len() {
            if self.alive[x] {
                self.fitness[x] = self.fitness[x] + self.term(victim, x);
            }
        }
    }
}

/// Fitness of every point against all the others.
pub fn ibea_fitness<T: Scalar, P: AsRef<[T]>>(points: &[P], kappa: T) -> Result<Vec<T>, MoeaError> {
    let state = IbeaFitness::new(points, kappa)?;
    Ok(state.fitness)
}

/// IBEA environmental selection: repeatedly drop the worst-fitness individual
/// until `n` remain. Returns surviving indices ascending.
pub fn ibea_select<T: Scalar, P: AsRef<[T]>>(points: &[P], n: usize, kappa: T) -> Result<Vec<usize>, MoeaError> {
    if n > points.len() {
        return Err(MoeaError::SelectionSize { requested: n, available: points.len() });
    }
    let mut state = IbeaFitness::new(points, kappa)?;
    if state.is_degenerate() {
        return Ok((0..n).collect());
    }
    while state.alive_count() > n {
        let w = state.worst().expect("population nonempty");
        state.remove(w);
    }
    Ok((0..points.len()).filter(|&i| state.is_alive(i)).collect())
}
