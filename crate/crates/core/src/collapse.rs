//! Surface-state machinery: the state Ψ(S) assigned to a causal surface S
//! incorporates the collapses of exactly the measurements before S. The
//! point-prescriptions are special cases: the backward-cone prescription
//! assigns Ψ(η(P)) to P, the forward-cone prescription assigns Ψ(σ(P)), and
//! the flat-frame prescription (an extension, not in the original scheme)
//! assigns the state of the constant-time surface through P in a chosen
//! frame.

use crate::error::{Error, Result};
use crate::hilbert::{normalize, StateVector, MIN_NORM};
use crate::scenario::{apply_event, EventSpec, OutcomeAssignment, Scenario, WorldLine};
use crate::spacetime::{boost, CausalSurface, Event};

/// Rule assigning a state to a spacetime point.
#[derive(Debug, Clone, PartialEq)]
pub enum Prescription {
    /// Collapse along the backward light cone: point state is Ψ(η(P)).
    Hk,
    /// Collapse along the forward light cone: point state is Ψ(σ(P)).
    ForwardCone,
    /// Collapse at constant time in the frame of the given rapidity.
    FlatFrame(f64),
    /// Evaluate on an explicitly given surface, ignoring the point.
    ExplicitSurface(CausalSurface),
}

impl Prescription {
    /// The surface whose state this prescription assigns to point `p`.
    pub fn surface_at(&self, p: Event) -> CausalSurface {
        match self {
            Prescription::Hk => CausalSurface::ForwardCone(p),
            Prescription::ForwardCone => CausalSurface::BackwardCone(p),
            Prescription::FlatFrame(phi) => CausalSurface::flat(boost(p, *phi).t, *phi),
            Prescription::ExplicitSurface(s) => s.clone(),
        }
    }
}

impl std::fmt::Display for Prescription {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prescription::Hk => write!(f, "hk"),
            Prescription::ForwardCone => write!(f, "forward"),
            Prescription::FlatFrame(phi) => write!(f, "flat({phi})"),
            Prescription::ExplicitSurface(s) => write!(f, "surface({s})"),
        }
    }
}

/// The state assigned to a surface, with the joint probability of the
/// conditioning outcomes.
#[derive(Debug, Clone)]
pub struct SurfaceState {
    pub state: StateVector,
    pub weight: f64,
    pub surface: CausalSurface,
    pub outcomes: OutcomeAssignment,
    /// True when the conditioning outcomes have zero probability; `state`
    /// is then the (unnormalizable) zero vector.
    pub impossible: bool,
}

/// Applies a sequence of events to the initial state without intermediate
/// renormalization; returns the final unnormalized vector.
pub fn apply_events(
    s: &Scenario,
    events: &[&EventSpec],
    oa: &OutcomeAssignment,
) -> Result<StateVector> {
    let mut psi = s.initial.clone();
    for ev in events {
        psi = apply_event(ev, oa, &psi)?;
    }
    Ok(psi)
}

/// Ψ(surf): collapses from every event before `surf`, applied in a
/// deterministic linearization of the causal partial order; weight is the
/// squared norm of the unnormalized result.
pub fn surface_state(
    s: &Scenario,
    surf: &CausalSurface,
    oa: &OutcomeAssignment,
) -> Result<SurfaceState> {
    let events = s.events_before(surf)?;
    for ev in &events {
        if ev.is_measurement() && !oa.contains_key(&ev.id) {
            return Err(Error::Query(format!(
                "measurement {} is before {surf} but has no assigned outcome",
                ev.id
            )));
        }
    }
    let raw = apply_events(s, &events, oa)?;
    let weight = raw.norm_sq();
    if weight < MIN_NORM {
        return Ok(SurfaceState {
            state: raw,
            weight: 0.0,
            surface: surf.clone(),
            outcomes: oa.clone(),
            impossible: true,
        });
    }
    Ok(SurfaceState {
        state: normalize(&raw)?,
        weight,
        surface: surf.clone(),
        outcomes: oa.clone(),
        impossible: false,
    })
}

/// The state a prescription assigns to the spacetime point `p`.
pub fn point_state(
    s: &Scenario,
    p: Event,
    presc: &Prescription,
    oa: &OutcomeAssignment,
) -> Result<SurfaceState> {
    surface_state(s, &presc.surface_at(p), oa)
}

/// One segment of a world-line trace: the state is valid on the open time
/// interval (t_start, t_end); `crossings` lists the events whose collapse
/// becomes included at t_start.
#[derive(Debug, Clone)]
pub struct TraceSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub state: SurfaceState,
    pub crossings: Vec<String>,
}

const CROSSING_TOL: f64 = 1e-10;

pub(crate) fn included_at(wl: &WorldLine, t: f64, ev: &EventSpec, presc: &Prescription) -> bool {
    let p = Event::new(t, wl.position_at(t));
    presc.surface_at(p).side_of(ev.at) == crate::spacetime::SurfaceSide::Before
}

/// Traces the per-point state along a world-line: segments it at the times
/// where event light cones (or the moving flat surface) cross it, and
/// evaluates the prescription at each segment's midpoint.
pub fn worldline_trace(
    s: &Scenario,
    wl: &WorldLine,
    presc: &Prescription,
    oa: &OutcomeAssignment,
) -> Result<Vec<TraceSegment>> {
    if matches!(presc, Prescription::ExplicitSurface(_)) {
        return Err(Error::Query(
            "worldline trace needs a point prescription, not an explicit surface".into(),
        ));
    }
    let (t0, t1) = (wl.t_start(), wl.t_end());
    if t1 <= t0 {
        let state = point_state(s, wl.vertices[0], presc, oa)?;
        return Ok(vec![TraceSegment { t_start: t0, t_end: t0, state, crossings: vec![] }]);
    }

    // Inclusion of each event is monotone in time along a causal world-line,
    // so a sign change brackets exactly one crossing; bisect it out.
    let mut crossings: Vec<(f64, String)> = Vec::new();
    for ev in &s.events {
        let lo_in = included_at(wl, t0, ev, presc);
        let hi_in = included_at(wl, t1, ev, presc);
        if lo_in == hi_in {
            continue;
        }
        let (mut lo, mut hi) = (t0, t1);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if included_at(wl, mid, ev, presc) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossings.push((0.5 * (lo + hi), ev.id.clone()));
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Merge crossings into segment boundaries.
    let mut boundaries: Vec<(f64, Vec<String>)> = Vec::new();
    for (t, id) in crossings {
        match boundaries.last_mut() {
            Some((tb, ids)) if (t - *tb).abs() <= CROSSING_TOL => ids.push(id),
            _ => boundaries.push((t, vec![id])),
        }
    }

    let mut out = Vec::new();
    let mut lo = t0;
    let mut pending: Vec<String> = Vec::new();
    let mut cuts: Vec<(f64, Vec<String>)> = boundaries;
    cuts.push((t1, Vec::new()));
    for (hi, ids) in cuts {
        if hi - lo > CROSSING_TOL {
            let mid = 0.5 * (lo + hi);
            let p = Event::new(mid, wl.position_at(mid));
            let state = point_state(s, p, presc, oa)?;
            out.push(TraceSegment {
                t_start: lo,
                t_end: hi,
                state,
                crossings: std::mem::take(&mut pending),
            });
            lo = hi;
            pending = ids;
        } else {
            pending.extend(ids);
        }
    }
    Ok(out)
}
