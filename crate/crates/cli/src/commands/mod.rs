pub mod encode;
pub mod limits;
pub mod verify;
