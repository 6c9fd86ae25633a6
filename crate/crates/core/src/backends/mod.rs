pub mod lie2;
pub mod module;
