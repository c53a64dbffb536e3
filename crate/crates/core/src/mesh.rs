//! Discontinuous element chain with duplicated interface nodes.
//!
//! Every element owns its two nodes, so DOFs are element-contiguous: element
//! `e` holds global indices `12e..12e+12` in slot order `[p1, t1, p2, t2]`.

use std::ops::Range;

use crate::beam::{ElementDofs, Vec3};
use crate::error::{Error, Result};

pub const DOFS_PER_NODE: usize = 6;
pub const DOFS_PER_ELEMENT: usize = 12;
/// Half-bandwidth of any matrix coupling two adjacent elements.
pub const BANDWIDTH: usize = 2 * DOFS_PER_ELEMENT - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    Start,
    End,
}

impl End {
    /// Parametric coordinate of this end.
    pub fn xi(self) -> f64 {
        match self {
            End::Start => -1.0,
            End::End => 1.0,
        }
    }

    fn index(self) -> usize {
        match self {
            End::Start => 0,
            End::End => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofKind {
    Position,
    Tangent,
}

/// One of the two nodes owned by an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub element: usize,
    pub end: End,
}

impl NodeRef {
    pub fn new(element: usize, end: End) -> Self {
        NodeRef { element, end }
    }

    /// Global node index in the duplicated numbering.
    pub fn index(&self) -> usize {
        2 * self.element + self.end.index()
    }

    pub fn dof(&self, kind: DofKind, component: usize) -> usize {
        debug_assert!(component < 3);
        let k = match kind {
            DofKind::Position => 0,
            DofKind::Tangent => 3,
        };
        DOFS_PER_NODE * self.index() + k + component
    }

    pub fn dofs(&self, kind: DofKind) -> [usize; 3] {
        [self.dof(kind, 0), self.dof(kind, 1), self.dof(kind, 2)]
    }
}

/// Straight reference beam cut into elements.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamMesh {
    lengths: Vec<f64>,
    starts: Vec<f64>,
    origin: Vec3,
    direction: Vec3,
}

impl BeamMesh {
    pub fn new(lengths: Vec<f64>, origin: Vec3, direction: Vec3) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Domain("mesh needs at least one element".into()));
        }
        if let Some(h) = lengths.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::Domain(format!("element length must be positive, got {h}")));
        }
        let dn = direction.norm();
        if !(dn > 0.0) {
            return Err(Error::Domain("beam direction must be nonzero".into()));
        }
        let mut starts = Vec::with_capacity(lengths.len());
        let mut s = 0.0;
        for h in &lengths {
            starts.push(s);
            s += h;
        }
        Ok(BeamMesh { lengths, starts, origin, direction: direction / dn })
    }

    /// `n` equal elements over `length`, starting at the origin along +x.
    pub fn uniform(length: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("mesh needs at least one element".into()));
        }
        Self::new(vec![length / n as f64; n], Vec3::zeros(), Vec3::x())
    }

    pub fn n_elements(&self) -> usize {
        self.lengths.len()
    }

    pub fn n_interfaces(&self) -> usize {
        self.lengths.len() - 1
    }

    pub fn n_dofs(&self) -> usize {
        DOFS_PER_ELEMENT * self.lengths.len()
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    /// Reference arc length at the start of element `e`.
    pub fn start(&self, e: usize) -> f64 {
        self.starts[e]
    }

    /// Reference arc length of a node.
    pub fn node_s(&self, node: NodeRef) -> f64 {
        match node.end {
            End::Start => self.starts[node.element],
            End::End => self.starts[node.element] + self.lengths[node.element],
        }
    }

    pub fn element_range(&self, e: usize) -> Range<usize> {
        DOFS_PER_ELEMENT * e..DOFS_PER_ELEMENT * (e + 1)
    }

    pub fn element_dofs(&self, x: &[f64], e: usize) -> ElementDofs {
        ElementDofs::from_slice(&x[self.element_range(e)], self.lengths[e])
    }

    /// The two coincident nodes at interior interface `n` (between elements n and n+1).
    pub fn interface_nodes(&self, n: usize) -> (NodeRef, NodeRef) {
        (NodeRef::new(n, End::End), NodeRef::new(n + 1, End::Start))
    }

    pub fn first_node(&self) -> NodeRef {
        NodeRef::new(0, End::Start)
    }

    pub fn last_node(&self) -> NodeRef {
        NodeRef::new(self.n_elements() - 1, End::End)
    }

    /// Every node with reference arc length within `tol` of `s`.
    pub fn nodes_at(&self, s: f64, tol: f64) -> Vec<NodeRef> {
        (0..self.n_elements())
            .flat_map(|e| [NodeRef::new(e, End::Start), NodeRef::new(e, End::End)])
            .filter(|n| (self.node_s(*n) - s).abs() <= tol)
            .collect()
    }

    /// Element containing reference arc length `s` and the matching parametric coordinate.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let e = match self.starts.binary_search_by(|a| a.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(self.n_elements() - 1);
        let xi = (2.0 * (s - self.starts[e]) / self.lengths[e] - 1.0).clamp(-1.0, 1.0);
        (e, xi)
    }

    /// Reference position of arc length `s`.
    pub fn reference_point(&self, s: f64) -> Vec3 {
        self.origin + self.direction * s
    }

    /// DOF vector of the unstressed straight beam.
    pub fn reference_state(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_dofs()];
        for e in 0..self.n_elements() {
            let dofs = ElementDofs::reference(self.reference_point(self.starts[e]), self.direction, self.lengths[e]);
            dofs.write_to(&mut x[self.element_range(e)]);
        }
        x
    }
}
