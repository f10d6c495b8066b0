//! Snakes in the dual discrete triangle, their bases of the dual space and
//! the unitriangular basis changes given by tail and diamond moves.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::flags::{double_ratios, triple_ratio, Flag, ScalarMatrix, TripleIndex};
use crate::linalg::Matrix;
use crate::valfield::ValuedScalar;

/// One step of a snake: increment `beta` (`B`) or `gamma` (`C`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    B,
    C,
}

/// A path of `d` points `(alpha_k, beta_k, gamma_k)` starting at
/// `(d-1, 0, 0)`, each step lowering `alpha` by one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Snake {
    points: Vec<(usize, usize, usize)>,
}

impl Snake {
    pub fn from_steps(d: usize, steps: &[Step]) -> Result<Snake> {
        if d < 2 || steps.len() != d - 1 {
            return Err(Error::InvalidSnake(format!(
                "{} steps for dimension {d}",
                steps.len()
            )));
        }
        let mut p = (d - 1, 0, 0);
        let mut points = vec![p];
        for s in steps {
            p = match s {
                Step::B => (p.0 - 1, p.1 + 1, p.2),
                Step::C => (p.0 - 1, p.1, p.2 + 1),
            };
            points.push(p);
        }
        Ok(Snake { points })
    }

    pub fn from_points(points: Vec<(usize, usize, usize)>) -> Result<Snake> {
        let s = Snake { points };
        if !s.validate() {
            return Err(Error::InvalidSnake(format!("{s}")));
        }
        Ok(s)
    }

    /// `sigma(k) = (d-k, k-1, 0)`.
    pub fn top(d: usize) -> Snake {
        Self::from_steps(d, &vec![Step::B; d - 1]).expect("d >= 2")
    }

    /// `sigma(k) = (d-k, 0, k-1)`.
    pub fn bottom(d: usize) -> Snake {
        Self::from_steps(d, &vec![Step::C; d - 1]).expect("d >= 2")
    }

    /// Every snake of dimension `d`.
    pub fn all(d: usize) -> Vec<Snake> {
        (0..1usize << (d - 1))
            .map(|mask| {
                let steps: Vec<Step> = (0..d - 1)
                    .map(|j| if mask >> j & 1 == 1 { Step::B } else { Step::C })
                    .collect();
                Self::from_steps(d, &steps).expect("valid step count")
            })
            .collect()
    }

    pub fn validate(&self) -> bool {
        let d = self.points.len();
        if d < 2 || self.points[0] != (d - 1, 0, 0) {
            return false;
        }
        self.points.windows(2).all(|w| {
            let ((a, b, c), (a2, b2, c2)) = (w[0], w[1]);
            a2 + 1 == a && ((b2 == b + 1 && c2 == c) || (b2 == b && c2 == c + 1))
        })
    }

    pub fn d(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[(usize, usize, usize)] {
        &self.points
    }

    /// 1-based point access, matching `sigma(k)`.
    pub fn point(&self, k: usize) -> (usize, usize, usize) {
        self.points[k - 1]
    }

    pub fn steps(&self) -> Vec<Step> {
        self.points
            .windows(2)
            .map(|w| if w[1].1 > w[0].1 { Step::B } else { Step::C })
            .collect()
    }

    /// 1-based step indices taken in the `B` direction.
    fn b_positions(&self) -> Vec<usize> {
        self.steps()
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Step::B)
            .map(|(j, _)| j + 1)
            .collect()
    }

    pub fn apply(&self, mv: &Move) -> Result<Snake> {
        let d = self.d();
        let mut steps = self.steps();
        match *mv {
            Move::Tail => {
                if steps[d - 2] != Step::C {
                    return Err(Error::InvalidSnake(format!("no tail move from {self}")));
                }
                steps[d - 2] = Step::B;
            }
            Move::Diamond { at, .. } => {
                if at < 2 || at >= d || steps[at - 2] != Step::C || steps[at - 1] != Step::B {
                    return Err(Error::InvalidSnake(format!(
                        "no diamond move at {at} from {self}"
                    )));
                }
                steps[at - 2] = Step::B;
                steps[at - 1] = Step::C;
            }
        }
        Self::from_steps(d, &steps)
    }
}

impl fmt::Display for Snake {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .points
            .iter()
            .map(|(a, b, c)| format!("({a},{b},{c})"))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl Serialize for Snake {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pts: Vec<[usize; 3]> = self.points.iter().map(|&(a, b, c)| [a, b, c]).collect();
        pts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Snake {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pts = Vec::<[usize; 3]>::deserialize(deserializer)?;
        Snake::from_points(pts.into_iter().map(|[a, b, c]| (a, b, c)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// An elementary snake move. A diamond move at `at` carries the index of
/// the triple ratio that scales the later basis vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Move {
    Tail,
    Diamond { at: usize, ratio_index: TripleIndex },
}

impl Move {
    /// Diamond move at position `at` of `snake`; the ratio index is
    /// `(alpha_k - 1, beta_k + 1, gamma_k + 1)` for `k = at - 1`.
    pub fn diamond(snake: &Snake, at: usize) -> Move {
        let (a, b, c) = snake.point(at - 1);
        Move::Diamond {
            at,
            ratio_index: TripleIndex::new(a - 1, b + 1, c + 1),
        }
    }
}

pub type MovePath = Vec<Move>;

/// A path of moves from `source` to `target`.
///
/// Moves only shift `B` steps towards the head (diamond) or create one at
/// the tail, so `target` must have at least as many `B` steps before every
/// position as `source`. Existing `B` steps are slid into place first, then
/// each new one enters by a tail move followed by a descending diamond sweep.
/// For bottom to top this is the alternating tail / diamond sweep.
pub fn canonical_path(source: &Snake, target: &Snake) -> Result<MovePath> {
    if source.d() != target.d() {
        return Err(Error::InvalidSnake("snakes of different dimensions".into()));
    }
    let d = source.d();
    let from = source.b_positions();
    let to = target.b_positions();
    let unreachable = || Error::NotReachable {
        from: source.to_string(),
        to: target.to_string(),
    };
    if to.len() < from.len() || from.iter().zip(&to).any(|(b, c)| c > b) {
        return Err(unreachable());
    }
    let mut path = Vec::new();
    let mut cur = source.clone();
    let mut push = |cur: &mut Snake, mv: Move| -> Result<()> {
        *cur = cur.apply(&mv)?;
        path.push(mv);
        Ok(())
    };
    for (&b, &c) in from.iter().zip(&to) {
        for at in (c + 1..=b).rev() {
            let mv = Move::diamond(&cur, at);
            push(&mut cur, mv)?;
        }
    }
    for &c in &to[from.len()..] {
        push(&mut cur, Move::Tail)?;
        for at in (c + 1..d).rev() {
            let mv = Move::diamond(&cur, at);
            push(&mut cur, mv)?;
        }
    }
    debug_assert_eq!(&cur, target);
    Ok(path)
}

/// Change of basis of one move: column `j` expresses the new `u'_j` in the
/// old basis.
pub fn move_matrix<T: Field>(mv: &Move, d: usize, ratio: &T) -> Matrix<T> {
    let mut m = Matrix::identity(d);
    match *mv {
        Move::Tail => m.set(d - 2, d - 1, T::one()),
        Move::Diamond { at, .. } => {
            m.set(at - 2, at - 1, T::one());
            for i in at..d {
                m.set(i, i, ratio.clone());
            }
        }
    }
    m
}

/// Ordered product of the move matrices along `path`, with diamond ratios
/// looked up in `ratios`.
pub fn path_matrix_from_ratios<T: Field>(
    d: usize,
    path: &[Move],
    ratios: &BTreeMap<TripleIndex, T>,
) -> Result<Matrix<T>> {
    let mut m = Matrix::identity(d);
    for mv in path {
        let ratio = match mv {
            Move::Tail => T::one(),
            Move::Diamond { ratio_index, .. } => ratios
                .get(ratio_index)
                .cloned()
                .ok_or_else(|| Error::InvalidIndex(format!("missing ratio ({ratio_index})")))?,
        };
        m = m.mul(&move_matrix(mv, d, &ratio));
    }
    Ok(m)
}

/// Basis change along `path` for the triple `(E, F, G)`.
pub fn path_matrix(e: &Flag, f: &Flag, g: &Flag, path: &[Move]) -> Result<ScalarMatrix> {
    let mut ratios = BTreeMap::new();
    for mv in path {
        if let Move::Diamond { ratio_index, .. } = mv {
            if !ratios.contains_key(ratio_index) {
                ratios.insert(*ratio_index, triple_ratio(e, f, g, *ratio_index)?);
            }
        }
    }
    path_matrix_from_ratios(e.dim(), path, &ratios)
}

/// The basis of the dual space attached to a snake; row `k` is `u_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnakeBasis {
    pub snake: Snake,
    pub vectors: ScalarMatrix,
}

impl SnakeBasis {
    pub fn vector(&self, k: usize) -> Vec<ValuedScalar> {
        self.vectors.row(k - 1)
    }
}

/// The covector spanning `(E^(d-1))^perp`, scaled so its first nonzero
/// entry is 1.
pub fn canonical_first_covector(e: &Flag) -> Vec<ValuedScalar> {
    let d = e.dim();
    let ann = e.subspace(d - 1).annihilator();
    let row = ann.row(0);
    let lead = row
        .iter()
        .find(|x| !x.is_zero())
        .expect("annihilator of a hyperplane is nonzero")
        .clone();
    let inv = lead.inverse().expect("nonzero");
    row.iter().map(|x| x.times(&inv)).collect()
}

/// Spanning covector of `(E^(k) + F^(l) + G^(m))^perp` for `k + l + m = d - 1`.
fn line(e: &Flag, f: &Flag, g: &Flag, k: usize, l: usize, m: usize) -> Result<Vec<ValuedScalar>> {
    let ann = Matrix::hstack(&[&e.subspace(k), &f.subspace(l), &g.subspace(m)]).annihilator();
    if ann.rows() != 1 {
        return Err(Error::MaxSpan {
            indices: vec![k, l, m],
        });
    }
    Ok(ann.row(0))
}

/// Snake basis of `(E, F, G)` for `snake`, with `u_1` equal to `scale` times
/// the canonical covector.
///
/// Each `u_{k+1}` comes from the unique decomposition
/// `u_k + u' + u'' = 0` into the two candidate next lines, taking `u'` for a
/// `C` step and `-u''` for a `B` step.
pub fn snake_basis(
    e: &Flag,
    f: &Flag,
    g: &Flag,
    snake: &Snake,
    scale: &ValuedScalar,
) -> Result<SnakeBasis> {
    let d = e.dim();
    if snake.d() != d {
        return Err(Error::InvalidSnake("snake dimension differs from flags".into()));
    }
    if scale.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut rows = vec![canonical_first_covector(e)
        .iter()
        .map(|x| x.times(scale))
        .collect::<Vec<_>>()];
    let steps = snake.steps();
    for k in 1..d {
        let (a, b, c) = snake.point(k);
        let p1 = line(e, f, g, a - 1, b, c + 1)?;
        let p2 = line(e, f, g, a - 1, b + 1, c)?;
        let system = Matrix::from_columns(d, &[p1.clone(), p2.clone()]);
        let rhs: Vec<ValuedScalar> = rows[k - 1].iter().map(|x| x.negate()).collect();
        let coeffs = system.solve(&rhs).map_err(|_| Error::MaxSpan {
            indices: vec![a - 1, b, c],
        })?;
        let next: Vec<ValuedScalar> = match steps[k - 1] {
            Step::C => p1.iter().map(|x| x.times(&coeffs[0])).collect(),
            Step::B => p2.iter().map(|x| x.times(&coeffs[1]).negate()).collect(),
        };
        rows.push(next);
    }
    Ok(SnakeBasis {
        snake: snake.clone(),
        vectors: Matrix::from_rows(rows)?,
    })
}

/// Matrix `M` with `u'_j = sum_i M_ij u_i` between two bases given as rows.
pub fn basis_change(from: &ScalarMatrix, to: &ScalarMatrix) -> Result<ScalarMatrix> {
    Ok(to.mul(&from.inverse()?).transpose())
}

/// `diag(Z_1...Z_{d-1}, ..., Z_1 Z_2, Z_1, 1)` for the quadruple
/// `(E, F, G, H)`.
pub fn shearing_matrix(e: &Flag, f: &Flag, g: &Flag, h: &Flag) -> Result<ScalarMatrix> {
    let z = double_ratios(e, f, g, h)?;
    Ok(shearing_from_ratios(&z))
}

/// Shearing matrix from the double ratios `Z_1, ..., Z_{d-1}`.
pub fn shearing_from_ratios(z: &[ValuedScalar]) -> ScalarMatrix {
    let d = z.len() + 1;
    let diag: Vec<ValuedScalar> = (1..=d)
        .map(|i| {
            z[..d - i]
                .iter()
                .fold(ValuedScalar::one(), |acc, x| acc.times(x))
        })
        .collect();
    Matrix::diagonal(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    #[test]
    fn top_and_bottom_formulas() {
        assert_eq!(Snake::bottom(6).point(3), (3, 0, 2));
        assert_eq!(Snake::top(6).point(4), (2, 3, 0));
        assert_eq!(Snake::top(2).points(), &[(1, 0, 0), (0, 1, 0)]);
        assert_eq!(Snake::bottom(2).points(), &[(1, 0, 0), (0, 0, 1)]);
        assert_eq!(Snake::bottom(2).apply(&Move::Tail).unwrap(), Snake::top(2));
        assert_eq!(Snake::all(3).len(), 4);
        assert!(Snake::all(5).iter().all(Snake::validate));
    }

    #[test]
    fn bottom_to_top_d3() {
        let path = canonical_path(&Snake::bottom(3), &Snake::top(3)).unwrap();
        assert_eq!(
            path,
            vec![
                Move::Tail,
                Move::Diamond {
                    at: 2,
                    ratio_index: TripleIndex::new(1, 1, 1)
                },
                Move::Tail
            ]
        );
        assert!(canonical_path(&Snake::top(3), &Snake::top(3)).unwrap().is_empty());
        assert!(matches!(
            canonical_path(&Snake::top(3), &Snake::bottom(3)),
            Err(Error::NotReachable { .. })
        ));
    }

    #[test]
    fn paths_replay_for_d5() {
        let path = canonical_path(&Snake::bottom(5), &Snake::top(5)).unwrap();
        let mut s = Snake::bottom(5);
        for mv in &path {
            s = s.apply(mv).unwrap();
            assert!(s.validate());
        }
        assert_eq!(s, Snake::top(5));
        // four tail moves plus 3 + 2 + 1 diamond moves
        assert_eq!(path.len(), 10);
    }

    #[test]
    fn move_matrix_examples() {
        let tail = move_matrix(&Move::Tail, 2, &Rational::one());
        assert_eq!(
            tail,
            Matrix::from_rows(vec![
                vec![Rational::one(), Rational::one()],
                vec![Rational::zero(), Rational::one()]
            ])
            .unwrap()
        );
        let x = Rational::from_int(7);
        let mv = Move::Diamond {
            at: 2,
            ratio_index: TripleIndex::new(1, 1, 1),
        };
        let m = move_matrix(&mv, 3, &x);
        let r = |n| Rational::from_int(n);
        assert_eq!(
            m,
            Matrix::from_rows(vec![
                vec![r(1), r(1), r(0)],
                vec![r(0), r(1), r(0)],
                vec![r(0), r(0), r(7)]
            ])
            .unwrap()
        );
    }

    #[test]
    fn json_shapes() {
        let path = canonical_path(&Snake::bottom(3), &Snake::top(3)).unwrap();
        let s = serde_json::to_string(&path).unwrap();
        assert_eq!(
            s,
            r#"[{"type":"tail"},{"type":"diamond","at":2,"ratio_index":[1,1,1]},{"type":"tail"}]"#
        );
        assert_eq!(
            serde_json::to_string(&Snake::bottom(3)).unwrap(),
            "[[2,0,0],[1,0,1],[0,0,2]]"
        );
    }

    #[test]
    fn normalized_bottom_basis() {
        let d = 4;
        let e = Flag::standard(d);
        let g = Flag::reversed_standard(d);
        // Any F with F^(1) = (1, ..., 1).
        let f = Flag::new(Matrix::from_fn(d, d, |i, j| {
            if j == 0 || i == j {
                ValuedScalar::one()
            } else {
                ValuedScalar::zero()
            }
        }))
        .unwrap();
        let basis = snake_basis(&e, &f, &g, &Snake::bottom(d), &ValuedScalar::one()).unwrap();
        for i in 1..=d {
            let mut expect = vec![ValuedScalar::zero(); d];
            expect[d - i] = ValuedScalar::from_int(if i % 2 == 1 { 1 } else { -1 });
            assert_eq!(basis.vector(i), expect);
        }
    }
}
