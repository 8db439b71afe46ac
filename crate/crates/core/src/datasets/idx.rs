//! IDX binary format: big-endian, magic-tagged arrays of unsigned bytes
//! (the format MNIST ships in). Magic 0x00000803 tags a rank-3 image array,
//! 0x00000801 a rank-1 label array.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// A parsed IDX array of unsigned bytes.
#[derive(Debug, Clone)]
pub struct IdxArray {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl IdxArray {
    /// Number of outermost entries (images or labels).
    pub fn count(&self) -> usize {
        self.dims.first().copied().unwrap_or(0)
    }

    /// Flattened length of one entry.
    pub fn row_len(&self) -> usize {
        self.dims.iter().skip(1).product::<usize>().max(1)
    }

    pub fn row(&self, index: usize) -> &[u8] {
        let len = self.row_len();
        &self.data[index * len..(index + 1) * len]
    }
}

fn read_u32_be(reader: &mut impl Read, offset: &mut usize, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader.read_exact(&mut buf).map_err(|e| {
        Error::Format(format!("truncated idx file at byte {offset} reading {what}: {e}"))
    })?;
    *offset += 4;
    Ok(u32::from_be_bytes(buf))
}

fn read_idx(path: &Path, expected_magic: u32, expected_rank: usize) -> Result<IdxArray> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = std::io::BufReader::new(file);
    let mut offset = 0usize;
    let magic = read_u32_be(&mut reader, &mut offset, "magic")?;
    if magic != expected_magic {
        return Err(Error::Format(format!(
            "bad magic 0x{magic:08x} at byte 0 of {}, expected 0x{expected_magic:08x}",
            path.display()
        )));
    }
    let mut dims = Vec::with_capacity(expected_rank);
    for i in 0..expected_rank {
        dims.push(read_u32_be(&mut reader, &mut offset, &format!("dimension {i}"))? as usize);
    }
    let total: usize = dims.iter().product();
    let mut data = vec![0u8; total];
    reader.read_exact(&mut data).map_err(|e| {
        Error::Format(format!(
            "truncated idx payload at byte {offset} of {}: expected {total} bytes: {e}",
            path.display()
        ))
    })?;
    Ok(IdxArray { dims, data })
}

/// Parse a rank-3 image file (count × rows × cols of u8).
pub fn read_idx_images(path: &Path) -> Result<IdxArray> {
    read_idx(path, IMAGE_MAGIC, 3)
}

/// Parse a rank-1 label file.
pub fn read_idx_labels(path: &Path) -> Result<IdxArray> {
    read_idx(path, LABEL_MAGIC, 1)
}

/// Serialize an image array in IDX form; used by tests and fixtures.
pub fn write_idx_images(path: &Path, count: usize, rows: usize, cols: usize, data: &[u8]) -> Result<()> {
    if data.len() != count * rows * cols {
        return Err(Error::Input(format!(
            "image payload {} does not match {}x{}x{}",
            data.len(),
            count,
            rows,
            cols
        )));
    }
    let mut out = Vec::with_capacity(16 + data.len());
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(count as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    out.extend_from_slice(data);
    std::fs::write(path, out)?;
    Ok(())
}

/// Serialize a label array in IDX form.
pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_images_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("imgs.idx");
        let lbl_path = dir.path().join("lbls.idx");
        let data: Vec<u8> = (0..2 * 3 * 4).map(|i| i as u8).collect();
        write_idx_images(&img_path, 2, 3, 4, &data).unwrap();
        write_idx_labels(&lbl_path, &[0, 1]).unwrap();

        let images = read_idx_images(&img_path).unwrap();
        assert_eq!(images.dims, vec![2, 3, 4]);
        assert_eq!(images.row(1), &data[12..]);
        let labels = read_idx_labels(&lbl_path).unwrap();
        assert_eq!(labels.data, vec![0, 1]);
    }

    #[test]
    fn label_magic_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wrong.idx");
        // An image file offered as labels must be rejected.
        write_idx_images(&path, 1, 1, 1, &[7]).unwrap();
        match read_idx_labels(&path) {
            Err(Error::Format(msg)) => assert!(msg.contains("bad magic"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncation_reports_offset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.idx");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&10u32.to_be_bytes()); // claims 10 images, no payload
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        std::fs::write(&path, bytes).unwrap();
        match read_idx_images(&path) {
            Err(Error::Format(msg)) => assert!(msg.contains("byte 16"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
