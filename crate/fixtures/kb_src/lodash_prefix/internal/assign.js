'use strict';

function assignMergeValue(object, key, value) {
  object[key] = value;
}

function baseMergeDeep(object, source, key, stack) {
  var srcValue = source[key];
  assignMergeValue(object, key, srcValue);
}

module.exports = {
  assignMergeValue: assignMergeValue,
  baseMergeDeep: baseMergeDeep
};
