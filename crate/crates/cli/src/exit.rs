use gvas::fgcomputer::FgError;
use gvas::ordinal::CapExceeded;
use gvas::pvas::PvasError;
use gvas::reach::ReachError;
use gvas::setops::SetError;
use gvas::text::ParseError;
use gvas::weakcomp::WeakError;

pub const DOMAIN: u8 = 1;
pub const USAGE: u8 = 2;
pub const RESOURCE: u8 = 3;

/// Marks an error as a usage mistake rather than a domain failure.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

fn reach_is_resource(e: &ReachError) -> bool {
    matches!(e, ReachError::ResourceLimit { .. })
}

fn set_is_resource(e: &SetError) -> bool {
    matches!(e, SetError::Reach(r) if reach_is_resource(r))
}

fn weak_is_resource(e: &WeakError) -> bool {
    match e {
        WeakError::CapExceeded { .. } => true,
        WeakError::Reach(r) => reach_is_resource(r),
        WeakError::Set(s) => set_is_resource(s),
        _ => false,
    }
}

pub fn status_of(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<ParseError>() || cause.is::<Usage>() {
            return USAGE;
        }
        let resource = cause.is::<CapExceeded>()
            || cause.downcast_ref::<ReachError>().is_some_and(reach_is_resource)
            || cause.downcast_ref::<SetError>().is_some_and(set_is_resource)
            || cause.downcast_ref::<WeakError>().is_some_and(weak_is_resource)
            || cause.downcast_ref::<PvasError>().is_some_and(|p| matches!(p, PvasError::ResourceLimit { .. }))
            || cause.downcast_ref::<FgError>().is_some_and(|f| match f {
                FgError::CapExceeded(_) => true,
                FgError::Reach(r) => reach_is_resource(r),
                FgError::Weak(w) => weak_is_resource(w),
                _ => false,
            });
        if resource {
            return RESOURCE;
        }
    }
    DOMAIN
}
