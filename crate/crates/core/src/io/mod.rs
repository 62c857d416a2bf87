//! File formats: binary PNM images and label maps, `ISF3` volumes and the
//! metrics CSV.

mod csv;
mod pnm;
mod volume;

pub use self::csv::{read_metrics_csv, write_metrics_csv, MetricsRow, METRICS_HEADER};
pub use self::pnm::{
    read_pnm, read_pnm_labels, read_pnm_lattice, write_labels, write_mask, write_overlay, write_pnm, PnmImage,
    PnmKind, CYAN, MAGENTA,
};
pub use self::volume::{read_volume, read_volume_lattice, write_volume, Volume, VolumeHeader, VOLUME_MAGIC};
