use ltlcheck::codec::{decode, encode};
use ltlcheck_core::protocol::{CheckerMessage, Descriptor, ExecutorMessage};
use ltlcheck_core::{State, Value};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        (-1e6f64..1e6).prop_map(Value::Number),
        any::<i32>().prop_map(|n| Value::Number(n as f64)),
        ".{0,6}".prop_map(Value::String),
    ];
    leaf.prop_recursive(2, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Value::Seq),
            prop::collection::btree_map("[a-z#.]{0,4}", inner, 0..3).prop_map(Value::Map),
        ]
    })
}

fn descriptor() -> impl Strategy<Value = Descriptor> {
    ("[a-z?!]{1,6}", prop::collection::vec(value(), 0..3)).prop_map(|(id, args)| Descriptor::new(id, args).unwrap())
}

fn state() -> impl Strategy<Value = State> {
    (
        prop::collection::btree_map("[#a-z]{1,4}\\.[a-z]{1,4}", value(), 0..4),
        prop::collection::vec("[a-z]{1,4}[!?]", 0..3),
    )
        .prop_map(|(fields, happened)| State { fields, happened })
}

fn checker_message() -> impl Strategy<Value = CheckerMessage> {
    prop_oneof![
        prop::collection::vec(".{0,8}", 0..4).prop_map(|dependencies| CheckerMessage::Start { dependencies }),
        (descriptor(), any::<u64>(), prop::option::of(any::<u64>()))
            .prop_map(|(action, version, timeout)| CheckerMessage::Act { action, version, timeout }),
        (any::<u64>(), any::<u64>()).prop_map(|(time, version)| CheckerMessage::Wait { time, version }),
        Just(CheckerMessage::End),
    ]
}

fn executor_message() -> impl Strategy<Value = ExecutorMessage> {
    prop_oneof![
        (descriptor(), state(), any::<u64>()).prop_map(|(event, state, version)| ExecutorMessage::Event { event, state, version }),
        (state(), any::<u64>()).prop_map(|(state, version)| ExecutorMessage::Acted { state, version }),
        (state(), any::<u64>()).prop_map(|(state, version)| ExecutorMessage::Timeout { state, version }),
        any::<u64>().prop_map(|version| ExecutorMessage::Stale { version }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn checker_messages_round_trip(m in checker_message()) {
        let line = encode(&m);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(decode::<CheckerMessage>(&line).unwrap(), m);
    }

    #[test]
    fn executor_messages_round_trip(m in executor_message()) {
        let line = encode(&m);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(decode::<ExecutorMessage>(&(line + "\n")).unwrap(), m);
    }
}

#[test]
fn wait_and_event_wire_format() {
    let wait = CheckerMessage::Wait { time: 1000, version: 2 };
    assert_eq!(encode(&wait), r#"{"tag":"Wait","time":1000,"version":2}"#);
    let event = ExecutorMessage::Event {
        event: Descriptor::new("changed", vec![Value::from("#remaining")]).unwrap(),
        state: State::new().with_field("#remaining.text", "179").with_happened(["changed"]),
        version: 3,
    };
    let line = r##"{"tag":"Event","event":{"id":"changed","args":["#remaining"]},"state":{"#remaining.text":"179","happened":["changed"]},"version":3}"##;
    assert_eq!(encode(&event), line);
    assert_eq!(decode::<ExecutorMessage>(line).unwrap(), event);
}
