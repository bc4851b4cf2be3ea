//! Shared q = 4 fixtures for unit tests.

use std::sync::OnceLock;

use crate::context::GroupContext;
use crate::maximal::{build_maximals, intersection_closure, IntersectionClosure, MaximalFamily, DEFAULT_NODE_BUDGET};

pub struct Fixture {
    pub ctx: GroupContext,
    pub maximals: Vec<MaximalFamily>,
    pub closure: IntersectionClosure,
}

pub fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let ctx = GroupContext::build(1).unwrap();
        let maximals = build_maximals(&ctx).unwrap();
        let closure = intersection_closure(&ctx, &maximals, DEFAULT_NODE_BUDGET).unwrap();
        Fixture { ctx, maximals, closure }
    })
}
