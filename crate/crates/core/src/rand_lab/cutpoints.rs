//! Cutpoints `0 = m_0 < m_1 < … < m_k` far enough apart that, with high
//! probability, no edge joins the neighbourhood of one cutpoint to the
//! neighbourhood of the next.

use super::PSeq;

#[derive(Debug, Clone, PartialEq)]
pub struct CutPoints {
    pub m: Vec<usize>,
    pub epsilon: f64,
}

/// An upper bound on `Prob(some edge {i, j} with i ≤ a+1 and j ≥ b-1)`.
pub fn gap_tail(p: &PSeq, a: usize, b: usize) -> f64 {
    (0..=a + 1).map(|i| p.tail((b - 1).saturating_sub(i).max(1))).sum()
}

impl CutPoints {
    pub fn k(&self) -> usize {
        self.m.len() - 1
    }

    /// The union bound over all gaps of [`gap_tail`].
    pub fn bound(&self, p: &PSeq) -> f64 {
        self.m.windows(2).map(|w| gap_tail(p, w[0], w[1])).sum()
    }

    pub fn as_u32(&self) -> Vec<u32> {
        self.m.iter().map(|&x| x as u32).collect()
    }
}

/// Picks each `m_{r+1}` minimal with `gap_tail(m_r, m_{r+1}) < ε/(3·2^{r+1})`,
/// so the bound summed over all gaps stays below `ε/3`.
pub fn choose_cutpoints(p: &PSeq, epsilon: f64, k: usize) -> CutPoints {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let mut m = vec![0usize];
    for r in 0..k {
        let a = m[r];
        let threshold = epsilon / (3.0 * 2f64.powi(r as i32 + 1));
        let mut b = a + 1;
        while gap_tail(p, a, b) >= threshold {
            b += 1;
        }
        m.push(b);
    }
    CutPoints { m, epsilon }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sequence_gives_consecutive_points() {
        assert_eq!(choose_cutpoints(&PSeq::zero(), 0.1, 5).m, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn nearest_neighbour_edges_need_gaps_of_four() {
        // an edge of length 1 from m_r + 1 reaches m_r + 2, so m_{r+1} - 1 must exceed that
        let c = choose_cutpoints(&PSeq::finite(&[(1, 2)]), 0.3, 4);
        assert_eq!(c.m, vec![0, 4, 8, 12, 16]);
        assert_eq!(c.bound(&PSeq::finite(&[(1, 2)])), 0.0);
    }

    #[test]
    fn minimal_and_below_budget() {
        for p in [PSeq::Geometric { c: 0.5, q: 0.5 }, PSeq::Power { c: 0.5, s: 3.0 }, PSeq::finite(&[(1, 3), (1, 5)])] {
            let c = choose_cutpoints(&p, 0.3, 4);
            assert!(c.bound(&p) < 0.1, "{p}");
            for (r, w) in c.m.windows(2).enumerate() {
                let threshold = 0.3 / (3.0 * 2f64.powi(r as i32 + 1));
                assert!(gap_tail(&p, w[0], w[1]) < threshold);
                assert!(w[1] == w[0] + 1 || gap_tail(&p, w[0], w[1] - 1) >= threshold);
            }
        }
    }

    #[test]
    fn tail_sum_matches_brute_force() {
        let p = PSeq::Geometric { c: 0.5, q: 0.5 };
        let (a, b) = (3, 9);
        let brute: f64 = (0..=a + 1).map(|i| (b - 1..400).map(|j| p.p(j - i)).sum::<f64>()).sum();
        assert!((brute - gap_tail(&p, a, b)).abs() < 1e-12);
    }
}
