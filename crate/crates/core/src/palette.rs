//! Fixed class colors for layout rasters.

use sha2::{Digest, Sha256};

use crate::raster::Rgb;
use crate::rng::mix64;
use crate::scene::ClassRegistry;

const OBJECT_COLORS: [Rgb; 10] = [
    [255, 158, 0],
    [255, 99, 71],
    [255, 69, 0],
    [255, 140, 0],
    [233, 150, 70],
    [0, 0, 230],
    [255, 61, 99],
    [220, 20, 60],
    [47, 79, 79],
    [112, 128, 144],
];

const ROAD_COLORS: [Rgb; 10] = [
    [255, 255, 255],
    [255, 255, 0],
    [0, 207, 191],
    [75, 0, 130],
    [175, 0, 75],
    [255, 0, 255],
    [0, 128, 255],
    [0, 255, 0],
    [160, 160, 160],
    [0, 128, 0],
];

/// Deterministic non-black color for registry entries past the fixed table.
fn extra_color(salt: u64, index: usize) -> Rgb {
    let h = mix64(salt ^ index as u64);
    [(h as u8) | 0x40, ((h >> 8) as u8) | 0x40, ((h >> 16) as u8) | 0x40]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub objects: Vec<(String, Rgb)>,
    pub roads: Vec<(String, Rgb)>,
}

impl Palette {
    pub fn for_registry(registry: &ClassRegistry) -> Self {
        let objects = registry
            .objects
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), OBJECT_COLORS.get(i).copied().unwrap_or_else(|| extra_color(1, i))))
            .collect();
        let roads = registry
            .roads
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.clone(), ROAD_COLORS.get(i).copied().unwrap_or_else(|| extra_color(2, i))))
            .collect();
        Self { objects, roads }
    }

    pub fn object_color(&self, label: &str) -> Option<Rgb> {
        self.objects.iter().find(|(n, _)| n == label).map(|(_, c)| *c)
    }

    pub fn road_color(&self, kind: &str) -> Option<Rgb> {
        self.roads.iter().find(|(n, _)| n == kind).map(|(_, c)| *c)
    }

    /// `name=r,g,b;…` as embedded in PNG text chunks.
    pub fn legend_text(entries: &[(String, Rgb)]) -> String {
        entries
            .iter()
            .map(|(n, c)| format!("{n}={},{},{}", c[0], c[1], c[2]))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"objects:");
        h.update(Self::legend_text(&self.objects).as_bytes());
        h.update(b"\nroads:");
        h.update(Self::legend_text(&self.roads).as_bytes());
        hex::encode(h.finalize())
    }
}

impl Default for Palette {
    fn default() -> Self {
        Self::for_registry(&ClassRegistry::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn colors_distinct_and_not_background() {
        let p = Palette::default();
        let all: Vec<Rgb> = p.objects.iter().chain(&p.roads).map(|(_, c)| *c).collect();
        assert!(all.iter().all(|c| *c != [0, 0, 0]));
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
    }

    #[test]
    fn extended_registry_gets_colors() {
        let mut r = ClassRegistry::default();
        r.objects.push("forklift".into());
        let p = Palette::for_registry(&r);
        assert_ne!(p.object_color("forklift").unwrap(), [0, 0, 0]);
        assert_ne!(p.sha256(), Palette::default().sha256());
    }
}
