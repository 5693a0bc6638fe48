//! Reading and writing point clouds.
//!
//! Two formats are supported:
//!
//! * `xyz` text: one `x y z` triple per line, whitespace separated, with
//!   `#` comment lines and blank lines ignored.
//! * ascii PLY restricted to a single `vertex` element carrying float (or
//!   double) `x`, `y`, `z` properties. Binary PLY and any other element or
//!   property are rejected with an explicit error rather than skipped.
//!
//! Coordinates are written with `Display`, which for Rust floats produces
//! the shortest string that parses back to the identical value, so save and
//! load round-trip exactly.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::Scalar;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

/// On-disk point cloud format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    XyzText,
    PlyAscii,
}

impl Format {
    /// Picks the format from a file extension: `.ply` is PLY, everything
    /// else is treated as xyz text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ply") => Format::PlyAscii,
            _ => Format::XyzText,
        }
    }
}

/// Loads a cloud, inferring the format from the extension. The cloud label
/// is the file stem.
pub fn load_cloud<T: Scalar + FromStr>(path: impl AsRef<Path>) -> Result<PointCloud<T>> {
    let path = path.as_ref();
    load_cloud_as(path, Format::from_path(path))
}

/// Loads a cloud in an explicit format.
pub fn load_cloud_as<T: Scalar + FromStr>(
    path: impl AsRef<Path>,
    format: Format,
) -> Result<PointCloud<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let points = match format {
        Format::XyzText => read_xyz(path, reader)?,
        Format::PlyAscii => read_ply(path, reader)?,
    };
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("cloud")
        .to_string();
    if points.is_empty() {
        return Err(Error::parse(path, 0, "file contains no points"));
    }
    PointCloud::new(points, label)
}

/// Saves a cloud, inferring the format from the extension.
pub fn save_cloud<T: Scalar>(cloud: &PointCloud<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_cloud_as(cloud, path, Format::from_path(path))
}

/// Saves a cloud in an explicit format.
pub fn save_cloud_as<T: Scalar>(
    cloud: &PointCloud<T>,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let result = match format {
        Format::XyzText => write_xyz(cloud, &mut w),
        Format::PlyAscii => write_ply(cloud, &mut w),
    };
    result.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn parse_coord<T: Scalar + FromStr>(
    token: &str,
    path: &Path,
    line_no: usize,
) -> Result<T> {
    token
        .parse::<T>()
        .map_err(|_| Error::parse(path, line_no, format!("invalid coordinate '{token}'")))
}

fn read_xyz<T: Scalar + FromStr>(
    path: &Path,
    reader: impl BufRead,
) -> Result<Vec<Point3<T>>> {
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::parse(path, line_no, format!("missing {what} coordinate")))
        };
        let x = parse_coord(next("x")?, path, line_no)?;
        let y = parse_coord(next("y")?, path, line_no)?;
        let z = parse_coord(next("z")?, path, line_no)?;
        if tokens.next().is_some() {
            return Err(Error::parse(path, line_no, "expected exactly 3 values per line"));
        }
        points.push(Point3::new(x, y, z));
    }
    Ok(points)
}

fn write_xyz<T: Scalar>(cloud: &PointCloud<T>, w: &mut impl Write) -> std::io::Result<()> {
    for p in cloud.iter() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    Ok(())
}

fn read_ply<T: Scalar + FromStr>(
    path: &Path,
    reader: impl BufRead,
) -> Result<Vec<Point3<T>>> {
    let mut lines = reader.lines().enumerate();
    let mut read_line = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((idx, line)) => Ok((idx + 1, line.map_err(|e| Error::io(path, e))?)),
            None => Err(Error::parse(path, 0, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (line_no, magic) = read_line("'ply' magic")?;
    if magic.trim() != "ply" {
        return Err(Error::parse(path, line_no, "not a PLY file (missing 'ply' magic)"));
    }

    let mut vertex_count: Option<usize> = None;
    let mut properties: Vec<String> = Vec::new();
    loop {
        let (line_no, line) = read_line("header line")?;
        let line = line.trim().to_string();
        let mut words = line.split_whitespace();
        match words.next() {
            Some("format") => {
                let kind = words.next().unwrap_or("");
                if kind != "ascii" {
                    return Err(Error::unsupported(
                        path,
                        format!("only ascii PLY is supported, found format '{kind}'"),
                    ));
                }
            }
            Some("comment") | Some("obj_info") => {}
            Some("element") => {
                let name = words.next().unwrap_or("");
                if name != "vertex" {
                    return Err(Error::unsupported(
                        path,
                        format!("unsupported element '{name}', only 'vertex' is handled"),
                    ));
                }
                if vertex_count.is_some() {
                    return Err(Error::parse(path, line_no, "duplicate vertex element"));
                }
                let count = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(path, line_no, "invalid vertex count"))?;
                vertex_count = Some(count);
            }
            Some("property") => {
                if vertex_count.is_none() {
                    return Err(Error::parse(path, line_no, "property before any element"));
                }
                let ty = words.next().unwrap_or("");
                let name = words.next().unwrap_or("");
                if !matches!(ty, "float" | "float32" | "double" | "float64") {
                    return Err(Error::unsupported(
                        path,
                        format!("unsupported property type '{ty}' for '{name}'"),
                    ));
                }
                if !matches!(name, "x" | "y" | "z") {
                    return Err(Error::unsupported(
                        path,
                        format!("unsupported vertex property '{name}', only x, y, z are handled"),
                    ));
                }
                properties.push(name.to_string());
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(Error::parse(path, line_no, format!("unknown header keyword '{other}'")));
            }
            None => {}
        }
    }

    let count =
        vertex_count.ok_or_else(|| Error::parse(path, 0, "header has no vertex element"))?;
    if properties != ["x", "y", "z"] {
        return Err(Error::unsupported(
            path,
            "vertex element must declare exactly the properties x, y, z in order",
        ));
    }

    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let (line_no, line) = read_line("vertex row")?;
        let mut tokens = line.split_whitespace();
        let mut next = |axis: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::parse(path, line_no, format!("missing {axis} value")))
        };
        let x = parse_coord(next("x")?, path, line_no)?;
        let y = parse_coord(next("y")?, path, line_no)?;
        let z = parse_coord(next("z")?, path, line_no)?;
        if tokens.next().is_some() {
            return Err(Error::parse(path, line_no, "expected exactly 3 values per vertex"));
        }
        points.push(Point3::new(x, y, z));
    }
    Ok(points)
}

fn write_ply<T: Scalar>(cloud: &PointCloud<T>, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", cloud.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    writeln!(w, "end_header")?;
    for p in cloud.iter() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn xyz_from(text: &str) -> Result<Vec<Point3<f64>>> {
        read_xyz(Path::new("test.xyz"), Cursor::new(text))
    }

    fn ply_from(text: &str) -> Result<Vec<Point3<f64>>> {
        read_ply(Path::new("test.ply"), Cursor::new(text))
    }

    #[test]
    fn three_line_xyz_parses_in_order() {
        let pts = xyz_from("0 0 0\n1 2 3\n-1.5 0.25 9\n").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1], Point3::new(1.0, 2.0, 3.0));
        assert_eq!(pts[2], Point3::new(-1.5, 0.25, 9.0));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let pts = xyz_from("# header\n\n1 1 1 # trailing comment\n# another\n2 2 2\n").unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let err = xyz_from("0 0 0\n1 2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn non_numeric_token_reports_line_and_token() {
        let err = xyz_from("0 0 zero\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        assert!(err.to_string().contains("zero"));
    }

    #[test]
    fn minimal_ply_parses() {
        let text = "ply\nformat ascii 1.0\ncomment made by hand\n\
                    element vertex 2\nproperty float x\nproperty float y\nproperty float z\n\
                    end_header\n0 0 0\n1.5 2 3\n";
        let pts = ply_from(text).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1], Point3::new(1.5, 2.0, 3.0));
    }

    #[test]
    fn binary_ply_is_rejected_explicitly() {
        let text = "ply\nformat binary_little_endian 1.0\nelement vertex 1\nend_header\n";
        let err = ply_from(text).unwrap_err();
        assert!(matches!(err, Error::Unsupported { .. }));
        assert!(err.to_string().contains("ascii"));
    }

    #[test]
    fn face_element_is_rejected_explicitly() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\n\
                    property float x\nproperty float y\nproperty float z\n\
                    element face 0\nproperty list uchar int vertex_indices\n\
                    end_header\n0 0 0\n";
        let err = ply_from(text).unwrap_err();
        assert!(err.to_string().contains("unsupported element 'face'"));
    }

    #[test]
    fn extra_vertex_property_is_rejected() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\n\
                    property float x\nproperty float y\nproperty float z\nproperty float nx\n\
                    end_header\n0 0 0\n";
        let err = ply_from(text).unwrap_err();
        assert!(err.to_string().contains("nx"));
    }

    #[test]
    fn truncated_vertex_list_is_a_parse_error() {
        let text = "ply\nformat ascii 1.0\nelement vertex 3\n\
                    property float x\nproperty float y\nproperty float z\n\
                    end_header\n0 0 0\n1 1 1\n";
        assert!(ply_from(text).is_err());
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cloud = PointCloud::new(
            vec![
                Point3::new(0.1, -0.2, 0.30000000000000004),
                Point3::new(1e-17, 2e9, -3.5),
            ],
            "roundtrip",
        )
        .unwrap();
        for name in ["cloud.xyz", "cloud.ply"] {
            let path = dir.path().join(name);
            save_cloud(&cloud, &path).unwrap();
            let back: PointCloud<f64> = load_cloud(&path).unwrap();
            assert_eq!(back.points(), cloud.points(), "format {name}");
        }
    }

    #[test]
    fn single_point_cloud_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.xyz");
        let cloud = PointCloud::new(vec![Point3::new(4.0, 5.0, 6.0)], "one").unwrap();
        save_cloud(&cloud, &path).unwrap();
        let back: PointCloud<f64> = load_cloud(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back.point(0), cloud.point(0));
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.xyz");
        std::fs::write(&path, "# nothing here\n").unwrap();
        let err = load_cloud::<f64>(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn missing_file_is_an_io_error_naming_the_path() {
        let err = load_cloud::<f64>("definitely/not/here.xyz").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("not/here.xyz"));
    }

    #[test]
    fn label_comes_from_file_stem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("torso.xyz");
        std::fs::write(&path, "0 0 0\n").unwrap();
        let cloud: PointCloud<f64> = load_cloud(&path).unwrap();
        assert_eq!(cloud.label(), "torso");
    }
}
