use serde::{Deserialize, Serialize};

/// Object and road class vocabularies.
///
/// The defaults are ten nuScenes-style object classes and ten road classes.
/// The ordering is significant: palette colors are assigned by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRegistry {
    pub objects: Vec<String>,
    pub roads: Vec<RoadClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadClass {
    pub name: String,
    /// Area outlines are drawn as closed rings.
    pub closed: bool,
}

pub const DEFAULT_OBJECT_CLASSES: [&str; 10] = [
    "car",
    "truck",
    "bus",
    "trailer",
    "construction_vehicle",
    "pedestrian",
    "motorcycle",
    "bicycle",
    "traffic_cone",
    "barrier",
];

pub const DEFAULT_ROAD_CLASSES: [(&str, bool); 10] = [
    ("lane_divider", false),
    ("road_divider", false),
    ("drivable_area_boundary", true),
    ("crosswalk", true),
    ("walkway", true),
    ("stop_line", false),
    ("carpark_area", true),
    ("lane_centerline", false),
    ("road_edge", false),
    ("traffic_island", true),
];

impl Default for ClassRegistry {
    fn default() -> Self {
        Self {
            objects: DEFAULT_OBJECT_CLASSES.iter().map(|s| s.to_string()).collect(),
            roads: DEFAULT_ROAD_CLASSES
                .iter()
                .map(|&(name, closed)| RoadClass { name: name.to_string(), closed })
                .collect(),
        }
    }
}

impl ClassRegistry {
    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn road_index(&self, kind: &str) -> Option<usize> {
        self.roads.iter().position(|r| r.name == kind)
    }

    pub fn road(&self, kind: &str) -> Option<&RoadClass> {
        self.roads.iter().find(|r| r.name == kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_has_ten_of_each() {
        let r = ClassRegistry::default();
        assert_eq!(r.objects.len(), 10);
        assert_eq!(r.roads.len(), 10);
        assert_eq!(r.object_index("car"), Some(0));
        assert!(r.road("crosswalk").unwrap().closed);
        assert!(r.road_index("river").is_none());
    }
}
