//! Fast certified evaluation of `L(x)` on dyadic balls, with precision escalation.

use std::cmp::Ordering;
use std::sync::Arc;


use crate::model::{IntegerPoint, LinearForm, TargetPoint};
use crate::rigorous::Ball;

use super::MinpointsError;

pub(crate) struct Level {
    pub bits: u64,
    pub xi: Vec<Ball>,
    /// `xi_k / xi_0`
    pub ratio: Vec<Ball>,
    /// `1 / |xi_0|`
    pub inv_abs_xi0: Ball,
}

/// An integer point with its branch forms and a level-0 enclosure of `L`.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub point: IntegerPoint,
    pub forms: Vec<LinearForm>,
    pub ball: Ball,
}

#[derive(Clone)]
pub(crate) struct Evaluator<'a> {
    target: &'a TargetPoint,
    levels: Vec<Arc<Level>>,
    start_bits: u64,
    cap: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(target: &'a TargetPoint, start_bits: u64, cap: u64) -> Result<Self, MinpointsError> {
        let mut ev = Evaluator { target, levels: Vec::new(), start_bits: start_bits.min(cap).max(16), cap };
        ev.level(0)?;
        Ok(ev)
    }

    fn bits_of(&self, i: usize) -> u64 {
        self.start_bits.checked_shl(i as u32).unwrap_or(u64::MAX).min(self.cap)
    }

    pub fn max_level(&self) -> usize {
        let mut i = 0;
        while self.bits_of(i) < self.cap {
            i += 1;
        }
        i
    }

    pub fn level(&mut self, i: usize) -> Result<Arc<Level>, MinpointsError> {
        while self.levels.len() <= i {
            let bits = self.bits_of(self.levels.len());
            let prec = bits + 8;
            let xi = self.target.balls(bits)?;
            let inv = xi[0].recip(prec).ok_or(MinpointsError::Model(crate::model::ModelError::ZeroLeadingCoordinate))?;
            let ratio = xi.iter().map(|b| b.mul(&inv, prec)).collect();
            let inv_abs_xi0 = inv.abs();
            self.levels.push(Arc::new(Level { bits, xi, ratio, inv_abs_xi0 }));
        }
        Ok(self.levels[i].clone())
    }

    pub fn level0(&self) -> &Level {
        &self.levels[0]
    }

    fn branch_balls(level: &Level, forms: &[LinearForm]) -> Vec<Ball> {
        let prec = level.bits + 8;
        forms.iter().map(|f| f.abs_ball(&level.xi, prec)).collect()
    }

    fn l_ball_from(level: &Level, forms: &[LinearForm]) -> Ball {
        let prec = level.bits + 8;
        let balls = Self::branch_balls(level, forms);
        balls[1..].iter().fold(balls[0].clone(), |acc, b| acc.max(b, prec))
    }

    pub fn candidate(&self, point: IntegerPoint) -> Candidate {
        let forms = LinearForm::branches(&point);
        let ball = Self::l_ball_from(self.level0(), &forms);
        Candidate { point, forms, ball }
    }

    pub fn l_ball(&mut self, forms: &[LinearForm], lvl: usize) -> Result<Ball, MinpointsError> {
        let level = self.level(lvl)?;
        Ok(Self::l_ball_from(&level, forms))
    }

    /// The form realizing the maximum, when every branch that could be maximal is the same form.
    fn argmax_form(level: &Level, forms: &[LinearForm]) -> Option<LinearForm> {
        let balls = Self::branch_balls(level, forms);
        let best_lower = balls.iter().map(|b| b.lower()).max()?;
        let mut winner: Option<&LinearForm> = None;
        for (b, f) in balls.iter().zip(forms) {
            if b.upper() >= best_lower {
                match winner {
                    None => winner = Some(f),
                    Some(w) if w == f => {}
                    Some(_) => return None,
                }
            }
        }
        winner.cloned()
    }

    /// Level-0 check only: `Some(ordering)` when already decided, without escalation.
    pub fn quick_cmp(&self, a: &Candidate, b: &Candidate) -> Option<Ordering> {
        if let Some(o) = a.ball.certain_cmp(&b.ball) {
            return Some(o);
        }
        let level = self.level0();
        match (Self::argmax_form(level, &a.forms), Self::argmax_form(level, &b.forms)) {
            (Some(fa), Some(fb)) if fa == fb => Some(Ordering::Equal),
            _ => None,
        }
    }

    /// Certified comparison of `L(a)` and `L(b)`; exact ties are recognised formally.
    pub fn compare(&mut self, a: &Candidate, b: &Candidate) -> Result<Ordering, MinpointsError> {
        if let Some(o) = self.quick_cmp(a, b) {
            return Ok(o);
        }
        let top = self.max_level();
        for lvl in 1..=top {
            let level = self.level(lvl)?;
            let ba = Self::l_ball_from(&level, &a.forms);
            let bb = Self::l_ball_from(&level, &b.forms);
            if let Some(o) = ba.certain_cmp(&bb) {
                return Ok(o);
            }
            if let (Some(fa), Some(fb)) = (Self::argmax_form(&level, &a.forms), Self::argmax_form(&level, &b.forms)) {
                if fa == fb {
                    return Ok(Ordering::Equal);
                }
            }
        }
        for c in [a, b] {
            if self.l_ball(&c.forms, top)?.contains_zero() {
                return Err(MinpointsError::DependentCoordinates { witness: c.point.to_string() });
            }
        }
        if self.target.coords().iter().any(|c| c.has_literal_floor()) {
            // the inputs themselves cannot separate the two values
            return Err(MinpointsError::DependentCoordinates { witness: format!("{} ~ {}", a.point, b.point) });
        }
        Err(MinpointsError::TieUnresolved { first: a.point.to_string(), second: b.point.to_string(), cap: self.cap })
    }

    /// Fails with `DependentCoordinates` when `L(a)` cannot be separated from zero within the cap.
    pub fn certify_positive(&mut self, a: &Candidate) -> Result<(), MinpointsError> {
        if !a.ball.contains_zero() {
            return Ok(());
        }
        for lvl in 1..=self.max_level() {
            let b = self.l_ball(&a.forms, lvl)?;
            if !b.contains_zero() {
                return Ok(());
            }
            if b.is_exact() && b.mid.is_zero() {
                break;
            }
        }
        Err(MinpointsError::DependentCoordinates { witness: a.point.to_string() })
    }
}
